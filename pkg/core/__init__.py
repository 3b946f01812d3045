# 随机粘合曲面统计核心模块
