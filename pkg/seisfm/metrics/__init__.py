"""Prediction quality (MSE, PSNR, SSIM, combined SSIM) and inference timing."""
from .errors import MetricsError
from .quality import (PSNR_CAP, CombinedScore, combined_ssim, gaussian_window, label_peak, label_range, mse, psnr,
                      ssim, ssim_map)
from .evaluation import MetricsRecord, evaluate, score
from .timing import TimingResult, time_inference
