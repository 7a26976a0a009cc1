#include "catnh/two_kpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "catnh/parallel.hpp"

namespace catnh {

void TwoKpoParams::validate() const {
  if (!(alpha >= kMinCatAmplitude) || !(beta >= kMinCatAmplitude)) {
    throw DegenerateAmplitude("cat amplitudes must be >= 1e-3");
  }
  if (!(coupling >= 0.0)) throw InvalidArgument("coupling must be >= 0");
  if (!(kerr2_ratio > 0.0)) throw InvalidArgument("K2/K1 must be positive");
  if (!(dephasing1 >= 0.0) || !(dephasing2 >= 0.0)) throw InvalidArgument("dephasing rates must be >= 0");
}

std::vector<std::string> TwoKpoParams::warnings() const {
  std::vector<std::string> out;
  const double min_gap = 4.0 * std::min(alpha * alpha, kerr2_ratio * beta * beta);
  if (coupling >= 0.1 * min_gap) {
    std::ostringstream os;
    os << "coupling " << coupling << " is not << min gap " << min_gap;
    out.push_back(os.str());
  }
  return out;
}

namespace {

Matrix4c two_qubit_matrix(double j, double big, double small) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = cplx(0.0, big);
  m(1, 1) = cplx(0.0, small);
  m(2, 2) = cplx(0.0, -small);
  m(3, 3) = cplx(0.0, -big);
  m(0, 3) = m(3, 0) = j;
  m(1, 2) = m(2, 1) = j;
  return m;
}

// Principal root with non-negative real part; J² − x² is real so the branch
// cut is approached from the +0 imaginary side.
cplx principal_root(double j, double x) { return std::sqrt(cplx(j * j - x * x, 0.0)); }

}  // namespace

TwoQubitNh build_two_kpo(const TwoKpoParams& params) {
  params.validate();
  const double g1 = params.gamma1();
  const double g2 = params.gamma2();
  const double j = params.j_eff();
  return TwoQubitNh{params, two_qubit_matrix(j, g1 + g2, g1 - g2), g1 + g2, g1 - g2, j};
}

TwoQubitNh build_two_kpo_from_rates(double j_eff, double delta_big, double delta_small) {
  if (!(j_eff >= 0.0)) throw InvalidArgument("J must be >= 0");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  TwoKpoParams p{nan, nan, nan, 1.0, nan, nan};
  return TwoQubitNh{p, two_qubit_matrix(j_eff, delta_big, delta_small), delta_big, delta_small, j_eff};
}

double concurrence_formula(cplx cal_e, double j_eff) {
  const double e = std::abs(cal_e);
  const double denom = j_eff * j_eff + e * e;
  if (denom == 0.0) throw UndefinedConcurrence("concurrence undefined for J = E = 0");
  return 2.0 * std::abs(j_eff) * e / denom;
}

double spin_flip_concurrence(const Vector4c& psi) {
  const Vector4c v = psi.normalized();
  // σy⊗σy in the computational order (00, 01, 10, 11) is anti-diagonal (−1, 1, 1, −1).
  const cplx overlap = -v(0) * v(3) + v(1) * v(2) + v(2) * v(1) - v(3) * v(0);
  return std::abs(overlap);
}

std::array<EntangledEigenpair, 4> analytic_eigensystem(const TwoQubitNh& model) {
  std::array<EntangledEigenpair, 4> out;
  const double j = model.j_eff;
  int slot = 0;
  for (Sector sector : {Sector::F, Sector::S}) {
    const double x = sector == Sector::F ? model.delta_big : model.delta_small;
    const cplx root = principal_root(j, x);
    const bool at_ep = j > 0.0 && std::abs(j - std::abs(x)) <= kTwoQubitEpRelTol * std::max(j, std::abs(x));
    // Sector f lives on components (0, 3), sector s on (1, 2).
    const int hi = sector == Sector::F ? 0 : 1;
    const int lo = sector == Sector::F ? 3 : 2;
    for (Parity branch : {Parity::Plus, Parity::Minus}) {
      EntangledEigenpair& e = out[slot++];
      e.sector = sector;
      e.branch = branch;
      e.energy = sign_of(branch) * root;
      e.cal_e = cplx(0.0, x) + e.energy;
      e.at_ep = at_ep;
      CVector v = CVector::Zero(4);
      if (j == 0.0) {
        // Uncoupled: eigenvectors are product basis states.
        const bool upper = std::abs(e.cal_e) > 0.0 || (x == 0.0 && branch == Parity::Plus);
        v(upper ? hi : lo) = 1.0;
        e.concurrence = 0.0;
      } else {
        v(hi) = e.cal_e;
        v(lo) = j;
        v /= std::sqrt(j * j + std::norm(e.cal_e));
        e.concurrence = concurrence_formula(e.cal_e, j);
      }
      fix_global_phase(v);
      e.eigenvector = v;
    }
  }
  return out;
}

std::pair<cplx, cplx> projected_coupling(double alpha, double beta, double coupling, int dim) {
  const FockSpace space(dim);
  const CatBasis a = make_cat_basis(alpha, space);
  const CatBasis b = make_cat_basis(beta, space);
  const Operator ann = make_annihilation(space);
  const Operator cre = make_creation(space);
  // <Cᵢ|X|Cⱼ> for X ∈ {a, a†}
  auto elem = [](const CatBasis& c, const Operator& op, Parity i, Parity j) {
    return c.state(i).inner(op * c.state(j));
  };
  const cplx pp_mm = coupling * (elem(a, cre, Parity::Plus, Parity::Minus) * elem(b, ann, Parity::Plus, Parity::Minus) +
                                 elem(a, ann, Parity::Plus, Parity::Minus) * elem(b, cre, Parity::Plus, Parity::Minus));
  const cplx pm_mp = coupling * (elem(a, cre, Parity::Plus, Parity::Minus) * elem(b, ann, Parity::Minus, Parity::Plus) +
                                 elem(a, ann, Parity::Plus, Parity::Minus) * elem(b, cre, Parity::Minus, Parity::Plus));
  return {pp_mm, pm_mp};
}

double concurrence_at(const TwoKpoParams& base, double beta, int index) {
  TwoKpoParams p = base;
  p.beta = beta;
  return analytic_eigensystem(build_two_kpo(p))[index].concurrence;
}

namespace {

double ep_residual(const TwoKpoParams& base, Sector sector, double beta) {
  TwoKpoParams p = base;
  p.beta = beta;
  const double g1 = p.gamma1();
  const double g2 = p.gamma2();
  const double x = sector == Sector::F ? g1 + g2 : std::abs(g1 - g2);
  return p.j_eff() - x;
}

}  // namespace

double find_ep_beta(const TwoKpoParams& base, Sector sector, double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("bracket must satisfy lo < hi");
  auto f = [&](double b) { return ep_residual(base, sector, b); };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << "sector " << to_string(sector) << ": no EP on [" << lo << ", " << hi << "]";
    throw NoSignChange(os.str());
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
  // Return the endpoint on the exact side so the sector is not left broken by
  // a rounding-level residual.
  return f(b) >= 0.0 ? b : a;
}

namespace {

std::optional<double> locate_ep(const TwoKpoParams& base, Sector sector,
                                const std::vector<double>& grid, std::vector<std::string>& notes) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r0 = ep_residual(base, sector, grid[i]);
    const double r1 = ep_residual(base, sector, grid[i + 1]);
    if (r0 == 0.0) return grid[i];
    if ((r0 > 0.0) != (r1 > 0.0)) return find_ep_beta(base, sector, grid[i], grid[i + 1]);
  }
  std::ostringstream os;
  os << "NoSignChange: sector " << to_string(sector) << " has no EP on the grid";
  notes.push_back(os.str());
  return std::nullopt;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("invalid grid specification");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + double(i) * step;
  g.back() = std::min(g.back(), hi);
  if (g.back() < hi - 1e-12) g.push_back(hi);
  return g;
}

}  // namespace

std::vector<double> refined_beta_grid(const TwoKpoParams& base, double lo, double hi, double step,
                                      int refine, double window) {
  std::vector<double> grid = uniform_grid(lo, hi, step);
  if (refine <= 1) return grid;
  std::vector<std::string> ignored;
  for (Sector s : {Sector::F, Sector::S}) {
    const auto ep = locate_ep(base, s, grid, ignored);
    if (!ep) continue;
    const double fine = step / refine;
    const double a = std::max(lo, *ep - window);
    const double b = std::min(hi, *ep + window);
    for (double x : uniform_grid(a, b, fine)) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             grid.end());
  return grid;
}

EntanglementSweep entanglement_sweep(const TwoKpoParams& base, const std::vector<double>& beta_grid,
                                     unsigned jobs) {
  if (beta_grid.empty()) throw InvalidArgument("beta grid is empty");
  for (std::size_t i = 1; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > beta_grid[i - 1])) throw InvalidArgument("beta grid must be strictly ascending");
  }
  EntanglementSweep out{base, {}, std::nullopt, std::nullopt, {}};
  out.rows = parallel_map(beta_grid.size(), jobs, [&](std::size_t i) {
    TwoKpoParams p = base;
    p.beta = beta_grid[i];
    const TwoQubitNh model = build_two_kpo(p);
    const auto pairs = analytic_eigensystem(model);
    EntanglementRow row{};
    row.beta = p.beta;
    row.gamma2 = p.gamma2();
    row.delta_big = model.delta_big;
    row.delta_small = model.delta_small;
    row.j_eff = model.j_eff;
    for (int k = 0; k < 4; ++k) {
      row.energy[k] = pairs[k].energy;
      row.concurrence[k] = pairs[k].concurrence;
    }
    return row;
  });

  const std::size_t n = out.rows.size();
  for (int k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      if (n == 1) {
        d = 0.0;
      } else if (i == 0 || i + 1 == n) {
        const std::size_t a = i == 0 ? 0 : n - 2;
        d = (out.rows[a + 1].concurrence[k] - out.rows[a].concurrence[k]) /
            (out.rows[a + 1].beta - out.rows[a].beta);
      } else {
        const double hm = out.rows[i].beta - out.rows[i - 1].beta;
        const double hp = out.rows[i + 1].beta - out.rows[i].beta;
        const double fm = out.rows[i - 1].concurrence[k];
        const double f0 = out.rows[i].concurrence[k];
        const double fp = out.rows[i + 1].concurrence[k];
        d = (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp));
      }
      out.rows[i].d_concurrence[k] = d;
    }
  }

  out.ep_f = locate_ep(base, Sector::F, beta_grid, out.notes);
  out.ep_s = locate_ep(base, Sector::S, beta_grid, out.notes);
  for (const auto& ep : {out.ep_f, out.ep_s}) {
    if (!ep) continue;
    const auto it = std::lower_bound(beta_grid.begin(), beta_grid.end(), *ep);
    if (it != beta_grid.begin() && it != beta_grid.end() && *it - *(it - 1) > 0.01 + 1e-12) {
      std::ostringstream os;
      os << "grid step near EP at beta=" << *ep << " exceeds 0.01";
      out.notes.push_back(os.str());
    }
  }
  return out;
}

}  // namespace catnh
