#pragma once

#include <memory>
#include <vector>

#include "steininfo/monte_carlo.hpp"
#include "steininfo/quadrature.hpp"
#include "steininfo/regression.hpp"
#include "steininfo/stein.hpp"

namespace steininfo {

/* X_t = sqrt(t) X + sqrt(1-t) Z along the variance-preserving Gaussian
   channel: the base law, its kernel, and the law of X_t. The base must be
   centered with unit variance so the channel noise covariance matches. */
struct ChannelPoint {
  LawPtr base;
  LawPtr mixed;
  double t = 0.5;
  std::shared_ptr<const SteinKernel1D> kernel;
};
ChannelPoint make_channel_point(const LawPtr& base, double t);

/* W_t = sqrt(t) X + sqrt(1-t) Y for independent centered X, Y, each carrying
   a score and a Stein kernel. gamma = Var(W_t) = t Var X + (1-t) Var Y. */
struct MixturePoint {
  LawPtr x, y;
  LawPtr mixed;  // grid law of W_t, the comparison oracle
  double t = 0.5;
  double gamma = 1.0;
  std::shared_ptr<const SteinKernel1D> kernel_x, kernel_y;
};
MixturePoint make_mixture_point(const LawPtr& x, const LawPtr& y, double t);

/* Score estimate of the form scale * fit(w) - slope * w: a regression of a
   conditional-expectation target plus an explicit linear part. */
class FittedScore {
 public:
  FittedScore(ConditionalFit fit, double scale, double slope)
      : fit_(std::move(fit)), scale_(scale), slope_(slope) {}

  double operator()(double w) const { return scale_ * fit_(w) - slope_ * w; }
  double conditional_part(double w) const { return scale_ * fit_(w); }

  const ConditionalFit& fit() const { return fit_; }
  double scale() const { return scale_; }
  double slope() const { return slope_; }

 private:
  ConditionalFit fit_;
  double scale_, slope_;
};

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/* Conditional-expectation representation of the score of W_t from the
   summands' kernels and scores:
     rho(w) + w/gamma = E[ (t/sqrt(1-t)) (1 - tau_X(X)/gamma) rho_Y(Y)
                        + ((1-t)/sqrt(t)) (1 - tau_Y(Y)/gamma) rho_X(X) | W_t = w ].
   Returned with scale 1 and slope 1/gamma. Valid when both summands have
   boundary-regular scores; a density jump in a non-Gaussian summand leaves
   a bias (see the negative-control tests). */
FittedScore score_of_sum_representation(const MixturePoint& point,
                                        const RegressorSpec& reg,
                                        const MCSpec& mc);

/* Cyclic n-summand generalization for W = sum_i sqrt(t_i) X_i with weights
   on the simplex: sum_i (t_i/sqrt(t_{i+1})) E[(1 - tau_i/gamma) rho_{i+1} | W],
   indices wrapping. n = 2 reduces to score_of_sum_representation exactly. */
FittedScore score_of_sum_n(const std::vector<LawPtr>& parts,
                           const std::vector<double>& weights,
                           const RegressorSpec& reg, const MCSpec& mc);

/* Gaussian-noise specialization: the score representation
     rho_t(w) + w = -(t/sqrt(1-t)) E[(1 - tau_X(X)) Z | X_t = w],
   needing only the kernel of X. Identical samplewise to the two-summand
   representation with a Gaussian second summand. */
FittedScore gaussian_smoothing_score(const ChannelPoint& point,
                                     const RegressorSpec& reg, const MCSpec& mc);

/* J_st(X_t) = (t^2/(1-t)) E[ g(X_t)^2 ], g = E[(1 - tau_X(X)) Z | X_t],
   estimated by a block cross-fitted product average (each sample is paired
   with a regression fitted without its own block, so the fit noise enters
   linearly, not quadratically). fisher adds the Gaussian floor: J = J_st + 1. */
struct Theorem1Report {
  MomentEstimate jst;
  MomentEstimate fisher;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};
Theorem1Report theorem1_jst(const ChannelPoint& point, const MCSpec& mc,
                            const RegressorSpec& reg = {});

/* Minimum mean square error of estimating X from X_t,
   E[(X - E[X|X_t])^2] = E[X^2] - E[m(X_t)^2], cross-fitted as
   1 - (1/n) sum_i X_i m(X_t,i). */
MomentEstimate mmse(const ChannelPoint& point, const MCSpec& mc,
                    const RegressorSpec& reg = {});

/* Conditional-mean form of the channel score,
     rho_t(w) = -(1/(1-t)) (w - sqrt(t) E[X | X_t = w]),
   plus the Fisher quantities it induces:
     J(X_t)    = 1/(1-t) - t MMSE/(1-t)^2,
     J_st(X_t) = (t/(1-t)) (1 - MMSE/(1-t)). */
struct GsvReport {
  FittedScore score;
  MomentEstimate mmse;
  MomentEstimate fisher;
  MomentEstimate jst;
};
GsvReport gsv_score(const ChannelPoint& point, const RegressorSpec& reg,
                    const MCSpec& mc);

/* Cross-estimator identity: 1 - MMSE/(1-t) = t E[g(X_t)^2], and the J_st
   values implied by each side. Residuals carry combined standard errors. */
struct VerduReport {
  double scalar_residual = 0.0, scalar_se = 0.0;
  double moment_residual = 0.0, moment_se = 0.0;
  MomentEstimate jst_representation;  // conditional-moment route (theorem1_jst)
  MomentEstimate jst_mmse;            // estimation-error route (mmse)
};
VerduReport verdu_identity_check(const ChannelPoint& point, const MCSpec& mc);

/* sqrt of int (a - b)^2 f over the [q_lo, q_hi] quantile range of the
   weighting law: all score identities here are L2(law) statements and
   regressions are unreliable in the far tails. */
double weighted_l2_gap(const RealFn& a, const RealFn& b, const Law1D& law,
                       double q_lo = 0.025, double q_hi = 0.975);

struct GapReport {
  double gap = 0.0;
  double std_error = 0.0;  // leave-one-block-out spread of the gap
};

// Gap between a fitted score and a fixed reference.
GapReport score_gap(const FittedScore& s, const RealFn& reference,
                    const Law1D& law, double q_lo = 0.025, double q_hi = 0.975);

// Gap between two fitted scores built from the same sample stream.
GapReport score_gap_pair(const FittedScore& a, const FittedScore& b,
                         const Law1D& law, double q_lo = 0.025,
                         double q_hi = 0.975);

}  // namespace steininfo
