from biflow.kernel.heat import (
    kernel_derivative_l1,
    kernel_gradient_norm,
    kernel_value,
    moment_check,
    pointwise_bound_scan,
)
from biflow.kernel.profile import KernelProfile, dense_profile, profile_g, write_profile_csv

__all__ = [
    "KernelProfile",
    "dense_profile",
    "kernel_derivative_l1",
    "kernel_gradient_norm",
    "kernel_value",
    "moment_check",
    "pointwise_bound_scan",
    "profile_g",
    "write_profile_csv",
]
