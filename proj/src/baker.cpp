#include "ibt/baker.hpp"

#include <string>

#include "ibt/error.hpp"

namespace ibt {

IbtMap::IbtMap(std::shared_ptr<const FactorMap> fm) : fm_(std::move(fm)) {
  if (!fm_) throw InvalidParameter("IbtMap: null factor map");
}

IbtMap::IbtMap(const CutFunction& cf)
    : fm_(std::make_shared<const FactorMap>(cf)) {}

namespace {
void check_point(SquarePoint pt) {
  if (!(pt.x >= 0.0 && pt.x <= 1.0 && pt.y >= 0.0 && pt.y <= 1.0)) {
    throw DomainError("point outside the unit square");
  }
}
}  // namespace

SquarePoint step(const IbtMap& m, SquarePoint pt) {
  check_point(pt);
  OrbitState s = OrbitState::from(pt);
  if (!m.advance(s)) throw NearCutError("step: x within 1e-12 of the cut A", 0);
  return s.point();
}

std::vector<SquarePoint> iterate(const IbtMap& m, SquarePoint pt, std::int64_t n) {
  if (n < 0) throw InvalidParameter("iterate: n must be non-negative");
  check_point(pt);
  std::vector<SquarePoint> traj;
  traj.reserve(static_cast<std::size_t>(n) + 1);
  traj.push_back(pt);
  OrbitState s = OrbitState::from(pt);
  for (std::int64_t k = 0; k < n; ++k) {
    if (!m.advance(s)) {
      throw NearCutError("iterate: orbit hit the cut at iterate " + std::to_string(k), k);
    }
    traj.push_back(s.point());
  }
  return traj;
}

double fiber(const IbtMap& m, double x, double y) {
  const FactorMap& fm = m.factor();
  if (std::fabs(x - fm.A()) < kCutTolerance) {
    throw NearCutError("fiber: x within 1e-12 of the cut A", 0);
  }
  const double t = fm.f_reference(x);
  const CutFunction& cf = fm.cut();
  if (x < fm.A()) return cf.phi(t) * y;
  const double omp = cf.one_minus_phi(t);
  return omp * y + (1.0 - omp);
}

double jacobian_det(const IbtMap& m, SquarePoint pt) {
  check_point(pt);
  // d/dy g from the tabulated step (affine in y, so an exact difference).
  const SquarePoint top = step(m, {pt.x, 1.0});
  const SquarePoint bottom = step(m, {pt.x, 0.0});
  const double dgdy = top.y - bottom.y;
  // Df from the reference inversion and the cut function itself.
  const FactorMap& fm = m.factor();
  const double t = fm.f_reference(pt.x);
  const CutFunction& cf = fm.cut();
  const double df = pt.x < fm.A() ? 1.0 / cf.phi(t) : 1.0 / cf.one_minus_phi(t);
  return df * dgdy;
}

}  // namespace ibt
