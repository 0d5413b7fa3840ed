#include "steininfo/registry.hpp"

#include <cmath>
#include <sstream>

namespace steininfo {

namespace {

constexpr double kUnifHalfWidth = 1.7320508075688772;  // sqrt(3)
constexpr double kLaplaceB = 0.7071067811865476;       // 1/sqrt(2)
constexpr double kMixMu = 0.8;
constexpr double kMixSigma = 0.6;

struct Blueprint {
  std::vector<Piece> pieces;
  BaseSampler sampler;
};

Blueprint gaussian_blueprint() {
  return {{GaussPiece{1.0, 0.0, 1.0}},
          [](SampleStream& st) { return st.next_gaussian(); }};
}

Blueprint uniform_blueprint() {
  const double L = kUnifHalfWidth;
  return {{FlatPiece{1.0 / (2.0 * L), -L, L}},
          [L](SampleStream& st) { return L * (2.0 * st.next_unit() - 1.0); }};
}

Blueprint exponential_blueprint() {
  return {{ExpPiece{1.0, 1.0, -1.0, +1}},
          [](SampleStream& st) { return -std::log(st.next_unit()) - 1.0; }};
}

Blueprint laplace_blueprint() {
  const double b = kLaplaceB;
  const double c = 1.0 / (2.0 * b);
  return {{ExpPiece{c, 1.0 / b, 0.0, +1}, ExpPiece{c, 1.0 / b, 0.0, -1}},
          [b](SampleStream& st) {
            const double u = st.next_unit() - 0.5;
            const double m = 1.0 - 2.0 * std::fabs(u);
            return u >= 0.0 ? -b * std::log(m) : b * std::log(m);
          }};
}

Blueprint mixture_blueprint() {
  return {{GaussPiece{0.5, -kMixMu, kMixSigma}, GaussPiece{0.5, kMixMu, kMixSigma}},
          [](SampleStream& st) {
            const double side = st.next_unit() < 0.5 ? -kMixMu : kMixMu;
            return side + kMixSigma * st.next_gaussian();
          }};
}

std::shared_ptr<PiecewiseLaw> raw(const std::string& name, Blueprint bp) {
  return std::make_shared<PiecewiseLaw>(name, std::move(bp.pieces),
                                        std::move(bp.sampler));
}

std::shared_ptr<PiecewiseLaw> smoothed(const std::string& name, Blueprint bp) {
  const double a = std::sqrt(kSmoothedBaseT);
  const double s = std::sqrt(1.0 - kSmoothedBaseT);
  return std::make_shared<PiecewiseLaw>(name, std::move(bp.pieces),
                                        std::move(bp.sampler), a, s);
}

}  // namespace

const std::vector<LawPtr>& registered_models() {
  static const std::vector<LawPtr> models = [] {
    auto gaussian = raw("gaussian", gaussian_blueprint());
    gaussian->set_closed_form_kernel([](double) { return 1.0; });

    auto uniform = raw("uniform", uniform_blueprint());
    uniform->set_closed_form_kernel([](double x) { return 0.5 * (3.0 - x * x); });

    auto exponential = raw("exponential", exponential_blueprint());
    exponential->set_closed_form_kernel([](double x) { return x + 1.0; });

    auto laplace = raw("laplace", laplace_blueprint());
    laplace->set_closed_form_kernel(
        [](double x) { return kLaplaceB * std::fabs(x) + kLaplaceB * kLaplaceB; });

    auto mixture = raw("mixture", mixture_blueprint());

    std::vector<LawPtr> m;
    m.push_back(gaussian);
    m.push_back(uniform);
    m.push_back(exponential);
    m.push_back(laplace);
    m.push_back(mixture);
    m.push_back(smoothed("uniform_smoothed", uniform_blueprint()));
    m.push_back(smoothed("exponential_smoothed", exponential_blueprint()));
    m.push_back(smoothed("laplace_smoothed", laplace_blueprint()));
    return m;
  }();
  return models;
}

LawPtr model_by_name(const std::string& name) {
  for (const auto& m : registered_models())
    if (m->name() == name) return m;
  std::ostringstream msg;
  msg << "unknown model '" << name << "'; registered:";
  for (const auto& m : registered_models()) msg << ' ' << m->name();
  throw DomainError(msg.str());
}

std::shared_ptr<const PiecewiseLaw> as_piecewise(const LawPtr& law) {
  return std::dynamic_pointer_cast<const PiecewiseLaw>(law);
}

}  // namespace steininfo
