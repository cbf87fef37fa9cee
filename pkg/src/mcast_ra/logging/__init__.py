# 日志模块
