# mcast_ra 工具模块
