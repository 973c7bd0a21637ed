"""Structure-modulated diffusion super-resolution."""

from ._core import (
    Schedule,
    box_downsample4,
    build_schedule,
    encode_spe,
    forward_jump,
    forward_step,
    gen_scene,
    loss_target,
    phi_direct,
    posterior_mean,
    psnr_y,
    read_image,
    restore,
    reverse_sample,
    rope_grid,
    run_invariants,
    ssim_y,
    train,
    upsample_bilinear4,
    write_image,
)

__all__ = [
    "Schedule",
    "box_downsample4",
    "build_schedule",
    "encode_spe",
    "forward_jump",
    "forward_step",
    "gen_scene",
    "loss_target",
    "phi_direct",
    "posterior_mean",
    "psnr_y",
    "read_image",
    "restore",
    "reverse_sample",
    "rope_grid",
    "run_invariants",
    "ssim_y",
    "train",
    "upsample_bilinear4",
    "write_image",
]
