# 配置模块：运行期配置见 loader.py，场景文件见 scenario_loader.py
