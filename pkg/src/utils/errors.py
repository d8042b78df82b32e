"""
异常定义

所有模块共享的异常层级，CLI 根据类型映射退出码：
ConfigError → 2，WindowExhausted → 3，InvariantViolation → 1。
"""


class LabError(Exception):
    """实验室异常基类"""


class ConfigError(LabError, ValueError):
    """配置校验失败"""


class FieldMismatchError(LabError, ValueError):
    """参与运算的元素不属于同一个域"""


class PreconditionError(LabError, ValueError):
    """操作前置条件不满足"""


class WindowExhausted(LabError, RuntimeError):
    """枚举窗口、闭包上界或半径不足"""


class PrecisionExhausted(WindowExhausted):
    """局部展开精度不足"""


class InvariantViolation(LabError, AssertionError):
    """校验不变量失败"""


class NotFoundInWindow(WindowExhausted):
    """对象不在已计算的球或窗口内"""
