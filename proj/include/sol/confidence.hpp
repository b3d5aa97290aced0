#pragma once

// Closed-form step sizes for the confidence-weighted learners. margin is
// M = y * <mu, x> and variance is V = x' Sigma x before the update.

namespace sol {

// Inverse normal CDF at the default confidence 0.7.
inline constexpr double kDefaultPhi = 0.5244005127080407;

// CW (linearized): smallest alpha >= 0 with M + alpha V >= phi * V' where
// V' = V / (1 + 2 alpha phi V); Sigma^-1 then grows by 2 alpha phi x x'.
double cw_step_size(double margin, double variance, double phi);

// ECCW (exact): smallest alpha >= 0 with M + alpha V >= phi * sqrt(u), u the
// posterior variance below; Sigma^-1 then grows by alpha phi / sqrt(u) x x'.
double eccw_step_size(double margin, double variance, double phi);

// Posterior variance u(alpha) = (-alpha V phi + sqrt(alpha^2 V^2 phi^2 + 4V))^2 / 4,
// evaluated in the rationalized form 4V^2 / (alpha V phi + sqrt(...))^2.
double eccw_posterior_variance(double alpha, double variance, double phi);

}  // namespace sol
