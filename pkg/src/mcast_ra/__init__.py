"""
mcast_ra：WiFi 组播速率自适应仿真与控制库

包含 MuDRA 控制环、K-worst 反馈协议、三种基线控制器、
确定性区间步进仿真器以及视频分段码率规划。
"""

__version__ = "0.1.0"
