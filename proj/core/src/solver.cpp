#include "qde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "qde/gammafn.hpp"
#include "qde/operators.hpp"
#include "qde/poly.hpp"
#include "qde/schubert.hpp"
#include "qde/varid.hpp"
#include "qde/weight_functions.hpp"

namespace qde {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Cplx kI{0.0, 1.0};

double int_distance(const Cplx& v) {
  return std::abs(v - Cplx(std::round(v.real()), 0.0));
}

bool near_integer(const Cplx& v) { return int_distance(v) < 1e-9; }

Cplx clog(const Cplx& v) { return std::log(v); }

}  // namespace

SolverConfig::SolverConfig(Shape s, std::vector<Cplx> zv, Cplx hv, Cplx kv, std::vector<Cplx> qv,
                           SeriesModel m, int trunc_cap, double tolerance, std::vector<int> br)
    : shape(std::move(s)),
      z(std::move(zv)),
      h(hv),
      kappa(kv),
      q(std::move(qv)),
      branch(std::move(br)),
      trunc(trunc_cap),
      tol(tolerance),
      model(m) {
  const int N = shape.N();
  const int n = shape.n();
  if (N < 1) throw DomainViolation("empty shape");
  if (static_cast<int>(z.size()) != n) throw DomainViolation("z size does not match the shape");
  if (static_cast<int>(q.size()) != N) throw DomainViolation("q size does not match the shape");
  branch.resize(static_cast<std::size_t>(N), 0);
  if (std::abs(kappa) == 0.0) throw DomainViolation("kappa must be nonzero");
  if (trunc < 3) throw DomainViolation("trunc must be at least 3");
  if (!(tol > 0.0)) throw DomainViolation("tol must be positive");
  for (const Cplx& qi : q)
    if (std::abs(qi) == 0.0) throw DomainViolation("q entries must be nonzero");
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      if (near_integer((z[a - 1] - z[b - 1]) / kappa))
        throw DomainViolation("z_a - z_b sits on the step lattice");
  if (model == SeriesModel::flag) return;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      if (a != b && near_integer((z[a - 1] - z[b - 1] + h) / kappa))
        throw DomainViolation("z_a - z_b + h sits on the step lattice");
  const Cplx hk = h / kappa;
  if (near_integer(hk)) {
    const long k = std::lround(hk.real());
    if (model == SeriesModel::dynamical && k <= 0)
      throw DomainViolation("h/kappa is a nonpositive integer");
    if (model == SeriesModel::quantum && k >= 0)
      throw DomainViolation("h/kappa is a nonnegative integer");
  }
  for (int i = 1; i < N; ++i) {
    const double ratio = model == SeriesModel::dynamical
                             ? std::abs(q[static_cast<std::size_t>(i)] / q[static_cast<std::size_t>(i - 1)])
                             : std::abs(q[static_cast<std::size_t>(i - 1)] / q[static_cast<std::size_t>(i)]);
    if (!(ratio < 1.0)) throw DomainViolation("q ratios must contract");
  }
}

Cplx SolverConfig::log_q(int i) const {
  return std::log(q.at(static_cast<std::size_t>(i - 1))) +
         Cplx(0.0, 2.0 * kPi * branch.at(static_cast<std::size_t>(i - 1)));
}

Cplx SeriesValue::value() const { return std::exp(log_prefactor) * sum; }

namespace {

struct VarNode {
  int level = 0;   // 1..N-1
  int slot = 0;    // 1..cum(level)
  int anchor = 0;  // 1-based z index
  int parent = -1; // matched variable one level up, -1 when that level is z
  std::vector<int> kids;  // matched variables one level down
};

// Gamma-type factor; argument = c0 + ca*d[va] + cb*d[vb]. Singular factors are
// the residue carriers: value S * (-1)^g / Gamma(1-g) at integer g <= 0.
struct GFac {
  Cplx c0{};
  int va = -1, ca = 0;
  int vb = -1, cb = 0;
  int expo = 1;
  bool singular = false;

  int shift(int v) const { return (v == va ? ca : 0) + (v == vb ? cb : 0); }
  long offset(const std::vector<int>& d) const {
    long s = 0;
    if (va >= 0) s += ca * d[static_cast<std::size_t>(va)];
    if (vb >= 0) s += cb * d[static_cast<std::size_t>(vb)];
    return s;
  }
};

// rational linear factor (c0 + scale*<lin,d>)^expo
struct LFac {
  Cplx c0{};
  int va = -1, ca = 0;
  int vb = -1, cb = 0;
  int expo = -1;

  int shift(int v) const { return (v == va ? ca : 0) + (v == vb ? cb : 0); }
  long offset(const std::vector<int>& d) const {
    long s = 0;
    if (va >= 0) s += ca * d[static_cast<std::size_t>(va)];
    if (vb >= 0) s += cb * d[static_cast<std::size_t>(vb)];
    return s;
  }
};

struct Engine {
  const SolverConfig* cfg = nullptr;
  IndexSet base;
  int V = 0;
  std::vector<VarNode> vars;
  std::vector<std::vector<int>> var_at;  // [level][slot] -> var index, 1-based indices
  Cplx t_shift{};                        // t change per unit offset
  Cplx lin_scale{};                      // x change per offset unit in LFac
  Cplx res_scale{};                      // singular factor value at g = 0
  std::vector<GFac> gfac;
  std::vector<LFac> lfac;
  std::vector<Cplx> level_log;  // log of the one-step multiplier per level
  Cplx qf_log{};                // base q-power log
  Cplx base_log{};              // full scalar log at the base point
  std::vector<QPower> q_powers;
  std::vector<std::pair<Cplx, int>> gamma_args;
  int kappa_power = 0;
  Cplx rational{1.0, 0.0};
};

void push_gamma_arg(Engine& e, const Cplx& arg, int expo) {
  for (auto& [a, p] : e.gamma_args)
    if (std::abs(a - arg) < 1e-12 * (1.0 + std::abs(arg))) {
      p += expo;
      return;
    }
  e.gamma_args.emplace_back(arg, expo);
}

Engine build_engine(const SolverConfig& c, const IndexSet& base) {
  if (!(base.shape() == c.shape)) throw DomainViolation("index set does not match the shape");
  Engine e;
  e.cfg = &c;
  e.base = base;
  const Shape& s = c.shape;
  const int N = s.N();
  const int n = s.n();
  const bool flagm = c.model == SeriesModel::flag;
  const bool quantum = c.model == SeriesModel::quantum;
  const Cplx kap = c.kappa;
  const Cplx kphi = c.model == SeriesModel::dynamical ? kap : -kap;

  e.var_at.assign(static_cast<std::size_t>(N), {});
  for (int j = 1; j < N; ++j) {
    const std::vector<int> up = base.union_prefix(j);
    e.var_at[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(s.cum(j)) + 1, -1);
    for (int a = 1; a <= s.cum(j); ++a) {
      VarNode v;
      v.level = j;
      v.slot = a;
      v.anchor = up[static_cast<std::size_t>(a - 1)];
      e.var_at[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] =
          static_cast<int>(e.vars.size());
      e.vars.push_back(v);
    }
  }
  e.V = static_cast<int>(e.vars.size());
  for (int vi = 0; vi < e.V; ++vi) {
    VarNode& v = e.vars[static_cast<std::size_t>(vi)];
    if (v.level + 1 >= N) continue;
    for (int b = 1; b <= s.cum(v.level + 1); ++b) {
      const int wi = e.var_at[static_cast<std::size_t>(v.level + 1)][static_cast<std::size_t>(b)];
      if (e.vars[static_cast<std::size_t>(wi)].anchor == v.anchor) {
        v.parent = wi;
        e.vars[static_cast<std::size_t>(wi)].kids.push_back(vi);
        break;
      }
    }
  }

  e.t_shift = c.model == SeriesModel::dynamical ? -kap : kap;
  e.lin_scale = kphi;
  e.res_scale = flagm ? -kap : kphi;

  for (int vi = 0; vi < e.V; ++vi) {
    const VarNode& v = e.vars[static_cast<std::size_t>(vi)];
    const int j = v.level;
    const Cplx ze = c.z[static_cast<std::size_t>(v.anchor - 1)];
    const int upcount = j + 1 < N ? s.cum(j + 1) : n;
    for (int b = 1; b <= upcount; ++b) {
      const int ui = j + 1 < N
                         ? e.var_at[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(b)]
                         : -1;
      const int ua = ui >= 0 ? e.vars[static_cast<std::size_t>(ui)].anchor : b;
      const Cplx zf = c.z[static_cast<std::size_t>(ua - 1)];
      if (!flagm) {
        if (ua == v.anchor) {
          GFac sf;
          sf.singular = true;
          sf.va = ui;
          sf.ca = ui >= 0 ? 1 : 0;
          sf.vb = vi;
          sf.cb = -1;
          e.gfac.push_back(sf);
          GFac hf;
          hf.c0 = c.h / kphi;
          hf.va = vi;
          hf.ca = 1;
          hf.vb = ui;
          hf.cb = ui >= 0 ? -1 : 0;
          e.gfac.push_back(hf);
        } else {
          const Cplx dz = (ze - zf) / kphi;
          GFac f1;
          f1.c0 = dz;
          f1.va = ui;
          f1.ca = ui >= 0 ? 1 : 0;
          f1.vb = vi;
          f1.cb = -1;
          e.gfac.push_back(f1);
          GFac f2;
          f2.c0 = c.h / kphi - dz;
          f2.va = vi;
          f2.ca = 1;
          f2.vb = ui;
          f2.cb = ui >= 0 ? -1 : 0;
          e.gfac.push_back(f2);
        }
      } else {
        if (ua == v.anchor) {
          GFac sf;
          sf.singular = true;
          sf.va = ui;
          sf.ca = ui >= 0 ? 1 : 0;
          sf.vb = vi;
          sf.cb = -1;
          e.gfac.push_back(sf);
        } else {
          GFac f1;
          f1.c0 = (zf - ze) / kap;
          f1.va = ui;
          f1.ca = ui >= 0 ? 1 : 0;
          f1.vb = vi;
          f1.cb = -1;
          e.gfac.push_back(f1);
        }
      }
    }
    for (int b = 1; b <= s.cum(j); ++b) {
      if (b == v.slot) continue;
      const int wi = e.var_at[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
      const Cplx zf = c.z[static_cast<std::size_t>(e.vars[static_cast<std::size_t>(wi)].anchor - 1)];
      if (!flagm) {
        LFac lf;
        lf.c0 = ze - zf - c.h;
        lf.va = wi;
        lf.ca = 1;
        lf.vb = vi;
        lf.cb = -1;
        e.lfac.push_back(lf);
        GFac g1;
        g1.c0 = (ze - zf) / kphi;
        g1.va = wi;
        g1.ca = 1;
        g1.vb = vi;
        g1.cb = -1;
        g1.expo = -1;
        e.gfac.push_back(g1);
        GFac g2;
        g2.c0 = (c.h - ze + zf) / kphi;
        g2.va = vi;
        g2.ca = 1;
        g2.vb = wi;
        g2.cb = -1;
        g2.expo = -1;
        e.gfac.push_back(g2);
      } else {
        GFac g1;
        g1.c0 = (zf - ze) / kap;
        g1.va = wi;
        g1.ca = 1;
        g1.vb = vi;
        g1.cb = -1;
        g1.expo = -1;
        e.gfac.push_back(g1);
      }
    }
  }

  // q-powers: one log factor per level plus the top-level factor
  const auto lq = [&](int i) { return quantum ? -c.log_q(i) : c.log_q(i); };
  e.level_log.assign(static_cast<std::size_t>(std::max(N - 1, 0)), Cplx{});
  Cplx sumz{};
  for (const Cplx& za : c.z) sumz += za;
  Cplx qf{};
  if (!flagm) {
    for (int j = 1; j < N; ++j) {
      const Cplx LQ = kI * kPi * double(s.part(j + 1) - s.part(j)) + lq(j) - lq(j + 1);
      e.level_log[static_cast<std::size_t>(j - 1)] = -LQ;
      Cplx Sj{};
      for (int a : base.union_prefix(j)) Sj += c.z[static_cast<std::size_t>(a - 1)];
      qf += LQ * Sj / kphi;
    }
    qf += (kI * kPi * double(n - s.part(N)) + lq(N)) * sumz / kphi;
  } else {
    for (int j = 1; j < N; ++j) {
      const Cplx LQ = kI * kPi * double(s.part(j) - s.part(j + 1)) -
                      double(s.part(j) + s.part(j + 1)) * clog(kap) + lq(j) - lq(j + 1);
      e.level_log[static_cast<std::size_t>(j - 1)] = LQ;
      Cplx Sj{};
      for (int a : base.union_prefix(j)) Sj += c.z[static_cast<std::size_t>(a - 1)];
      qf += LQ * Sj / kap;
    }
    qf += (kI * kPi * double(s.part(N) - n) + lq(N)) * sumz / kap;
  }
  e.qf_log = qf;

  for (int i = 1; i <= N; ++i) {
    QPower p;
    p.phase = c.model == SeriesModel::dynamical ? n - s.part(i) : s.part(i) - n;
    Cplx bs{};
    for (int a : base.blocks[static_cast<std::size_t>(i - 1)])
      bs += c.z[static_cast<std::size_t>(a - 1)];
    p.exponent = bs / kap;
    e.q_powers.push_back(p);
  }

  Cplx bl = qf;
  for (const GFac& f : e.gfac) {
    if (f.singular) {
      ++e.kappa_power;
    } else {
      bl += double(f.expo) * log_gamma(f.c0);
      push_gamma_arg(e, f.c0, f.expo);
    }
  }
  bl += double(e.kappa_power) * clog(e.res_scale);
  for (const LFac& f : e.lfac) {
    bl += double(f.expo) * clog(f.c0);
    e.rational *= f.expo > 0 ? f.c0 : Cplx(1.0, 0.0) / f.c0;
  }
  e.base_log = bl;
  return e;
}

// term multiplier for the unit step d -> d + dir*e_v; zero when the step
// leaves the nonzero-residue octant
Cplx unit_step(const Engine& e, const std::vector<int>& d, int v, int dir) {
  Cplx r = std::exp(double(dir) * e.level_log[static_cast<std::size_t>(
                                      e.vars[static_cast<std::size_t>(v)].level - 1)]);
  for (const GFac& f : e.gfac) {
    const int delta = dir * f.shift(v);
    if (delta == 0) continue;
    if (f.singular) {
      const long g = f.offset(d);
      r *= delta > 0 ? Cplx(double(g), 0.0) : Cplx(-1.0 / (1.0 - double(g)), 0.0);
    } else {
      const Cplx arg = f.c0 + double(f.offset(d));
      if (delta > 0)
        r *= f.expo > 0 ? arg : Cplx(1.0, 0.0) / arg;
      else
        r *= f.expo > 0 ? Cplx(1.0, 0.0) / (arg - 1.0) : arg - 1.0;
    }
  }
  for (const LFac& f : e.lfac) {
    const int delta = dir * f.shift(v);
    if (delta == 0) continue;
    const Cplx x0 = f.c0 + e.lin_scale * double(f.offset(d));
    const Cplx x1 = x0 + e.lin_scale * double(delta);
    r *= f.expo > 0 ? x1 / x0 : x0 / x1;
  }
  return r;
}

// slot layout for compiled weights: level variables, then z, then h
struct FastPoly {
  struct Term {
    Cplx coef;
    std::vector<std::pair<int, int>> pw;
  };
  std::vector<Term> terms;
};

FastPoly compile_weight(const Poly& p, const Engine& e) {
  const int n = e.cfg->shape.n();
  FastPoly f;
  for (const auto& [mono, coef] : p.terms()) {
    FastPoly::Term t;
    t.coef = Cplx(rat_double(coef), 0.0);
    for (const auto& [vid, ex] : mono.pw) {
      int slot = -1;
      if (vid.kind == VarKind::t)
        slot = e.var_at[static_cast<std::size_t>(vid.i)][static_cast<std::size_t>(vid.j)];
      else if (vid.kind == VarKind::z)
        slot = e.V + vid.i - 1;
      else if (vid.kind == VarKind::h)
        slot = e.V + n;
      else
        throw std::logic_error("series weight contains a non-evaluable variable");
      t.pw.emplace_back(slot, ex);
    }
    f.terms.push_back(std::move(t));
  }
  return f;
}

Cplx eval_fast(const FastPoly& f, const std::vector<Cplx>& vals) {
  Cplx s{};
  for (const auto& t : f.terms) {
    Cplx m = t.coef;
    for (const auto& [slot, ex] : t.pw)
      for (int k = 0; k < ex; ++k) m *= vals[static_cast<std::size_t>(slot)];
    s += m;
  }
  return s;
}

struct RunOut {
  std::vector<Cplx> sums;
  std::vector<double> tails;
  long terms = 0;
  int shells = 0;
};

bool step_allowed(const Engine& e, const std::vector<int>& d, int v) {
  for (int u : e.vars[static_cast<std::size_t>(v)].kids)
    if (d[static_cast<std::size_t>(u)] <= d[static_cast<std::size_t>(v)]) return false;
  return true;
}

RunOut run_series(const Engine& e, const std::vector<Poly>& weights) {
  const SolverConfig& c = *e.cfg;
  const int n = c.shape.n();
  const int K = static_cast<int>(weights.size());
  std::vector<FastPoly> fps;
  fps.reserve(static_cast<std::size_t>(K));
  for (const Poly& w : weights) fps.push_back(compile_weight(w, e));

  std::vector<Cplx> vals(static_cast<std::size_t>(e.V + n + 1));
  for (int a = 1; a <= n; ++a)
    vals[static_cast<std::size_t>(e.V + a - 1)] = c.z[static_cast<std::size_t>(a - 1)];
  vals[static_cast<std::size_t>(e.V + n)] = c.h;
  const auto set_point = [&](const std::vector<int>& d) {
    for (int v = 0; v < e.V; ++v)
      vals[static_cast<std::size_t>(v)] =
          c.z[static_cast<std::size_t>(e.vars[static_cast<std::size_t>(v)].anchor - 1)] +
          e.t_shift * double(d[static_cast<std::size_t>(v)]);
  };

  RunOut out;
  out.sums.assign(static_cast<std::size_t>(K), Cplx{});
  out.tails.assign(static_cast<std::size_t>(K), 0.0);
  std::vector<double> contrib(static_cast<std::size_t>(K), 0.0);
  std::vector<double> prev(static_cast<std::size_t>(K), 0.0);

  std::map<std::vector<int>, Cplx> shell;
  shell[std::vector<int>(static_cast<std::size_t>(e.V), 0)] = Cplx(1.0, 0.0);
  set_point(std::vector<int>(static_cast<std::size_t>(e.V), 0));
  for (int k = 0; k < K; ++k) {
    const Cplx w = eval_fast(fps[static_cast<std::size_t>(k)], vals);
    out.sums[static_cast<std::size_t>(k)] = w;
    contrib[static_cast<std::size_t>(k)] = std::abs(w);
  }
  out.terms = 1;

  int grow = 0;
  for (int sidx = 1; sidx <= c.trunc && e.V > 0; ++sidx) {
    std::map<std::vector<int>, Cplx> next;
    for (const auto& [d, tv] : shell) {
      for (int v = 0; v < e.V; ++v) {
        if (!step_allowed(e, d, v)) continue;
        std::vector<int> nd = d;
        ++nd[static_cast<std::size_t>(v)];
        if (next.count(nd)) continue;
        next.emplace(std::move(nd), tv * unit_step(e, d, v, +1));
      }
    }
    if (next.empty()) break;
    prev = contrib;
    std::fill(contrib.begin(), contrib.end(), 0.0);
    for (const auto& [d, tv] : next) {
      set_point(d);
      for (int k = 0; k < K; ++k) {
        const Cplx w = tv * eval_fast(fps[static_cast<std::size_t>(k)], vals);
        out.sums[static_cast<std::size_t>(k)] += w;
        contrib[static_cast<std::size_t>(k)] += std::abs(w);
      }
    }
    out.terms += static_cast<long>(next.size());
    out.shells = sidx;
    double mx = 0.0, mxprev = 0.0, scale = 0.0;
    for (int k = 0; k < K; ++k) {
      mx = std::max(mx, contrib[static_cast<std::size_t>(k)]);
      mxprev = std::max(mxprev, prev[static_cast<std::size_t>(k)]);
      scale = std::max(scale, std::abs(out.sums[static_cast<std::size_t>(k)]));
    }
    if (mxprev > 0.0 && mx > mxprev) {
      if (++grow >= 5) throw SlowConvergence("residue series grows at shell " + std::to_string(sidx));
    } else {
      grow = 0;
    }
    shell.swap(next);
    if (sidx >= 3 && mx <= c.tol * std::max(scale, 1e-300)) break;
  }

  for (int k = 0; k < K; ++k) {
    const double cur = contrib[static_cast<std::size_t>(k)];
    const double pre = prev[static_cast<std::size_t>(k)];
    const double rho = pre > 0.0 ? std::min(0.95, cur / pre) : 0.5;
    out.tails[static_cast<std::size_t>(k)] = cur * rho / (1.0 - rho);
  }
  return out;
}

Cplx omega_log(const SolverConfig& c) {
  const Shape& s = c.shape;
  Cplx om{};
  if (c.model == SeriesModel::dynamical) {
    for (int i = 1; i <= s.N(); ++i)
      for (int j = i + 1; j <= s.N(); ++j)
        om += c.h * double(s.part(i)) / c.kappa *
              clog(Cplx(1.0, 0.0) - c.q[static_cast<std::size_t>(j - 1)] /
                                        c.q[static_cast<std::size_t>(i - 1)]);
  } else if (c.model == SeriesModel::quantum) {
    for (int i = 1; i <= s.N(); ++i)
      for (int j = i + 1; j <= s.N(); ++j)
        om += c.h * double(std::min(0, s.part(j) - s.part(i))) / c.kappa *
              clog(Cplx(1.0, 0.0) - c.q[static_cast<std::size_t>(i - 1)] /
                                        c.q[static_cast<std::size_t>(j - 1)]);
  }
  return om;
}

// scalar normalization of the quantum series
Cplx quantum_norm_log(const SolverConfig& c) {
  const Shape& s = c.shape;
  const double l1 = double(s.level_sum());
  const double l2 = double(s.pair_product());
  return (-l1 - 2.0 * l2) * clog(c.kappa) + kI * kPi * (l1 + l2) -
         l1 * log_gamma(-c.h / c.kappa);
}

// scalar normalization of the flag-limit series
Cplx flag_norm_log(const SolverConfig& c, const IndexSet& I) {
  const Shape& s = c.shape;
  const double l1 = double(s.level_sum());
  const double l2 = double(s.pair_product());
  Cplx et{};
  for (int i = 1; i < s.N(); ++i) {
    Cplx Si{};
    for (int a : I.union_prefix(i)) Si += c.z[static_cast<std::size_t>(a - 1)];
    et += double(s.part(i) + s.part(i + 1)) * Si / c.kappa;
  }
  return (-l1 - l2) * clog(-c.kappa) + et * clog(c.kappa);
}

SolutionVector pack_solution(const Engine& e, const RunOut& r, const Cplx& extra_log,
                             std::vector<IndexSet> labels) {
  SolutionVector sv;
  sv.labels = std::move(labels);
  for (std::size_t k = 0; k < r.sums.size(); ++k) {
    SeriesValue v;
    v.q_powers = e.q_powers;
    v.gamma_args = e.gamma_args;
    v.log_prefactor = e.base_log + extra_log;
    v.sum = r.sums[k];
    v.terms = r.terms;
    v.tail = r.tails[k];
    sv.entries.push_back(std::move(v));
  }
  return sv;
}

Poly fixed_point_weight(const Shape& s, const IndexSet& K, bool flag_model) {
  const Poly w = flag_model ? w_hat_flag(s) : class_q(s) * w_hat(s);
  return w.substitute(gamma_substitution(s, K));
}

// exact log of the reported q-powers, used to strip the q-dependence
Cplx q_powers_log(const SolverConfig& c, const std::vector<QPower>& qp) {
  Cplx t{};
  for (std::size_t i = 0; i < qp.size(); ++i)
    t += qp[i].exponent * (kI * kPi * double(qp[i].phase) + c.log_q(static_cast<int>(i) + 1));
  return t;
}

std::map<VarId, Cplx> operator_point(const SolverConfig& c, bool invert_q) {
  std::map<VarId, Cplx> pt;
  for (int a = 1; a <= c.shape.n(); ++a) pt[z_var(a)] = c.z[static_cast<std::size_t>(a - 1)];
  pt[h_var()] = c.h;
  for (int i = 1; i <= c.shape.N(); ++i)
    pt[q_var(i)] = invert_q ? Cplx(1.0, 0.0) / c.q[static_cast<std::size_t>(i - 1)]
                            : c.q[static_cast<std::size_t>(i - 1)];
  pt[aux_var(0)] = c.kappa;
  return pt;
}

std::vector<Cplx> family_values(const SolverConfig& c, const IndexSet& fam) {
  const SolutionVector sv = c.model == SeriesModel::dynamical ? psi_J(c, fam)
                                                              : psi_hat(c, fam, true);
  std::vector<Cplx> out;
  out.reserve(sv.entries.size());
  for (const SeriesValue& v : sv.entries) out.push_back(v.value());
  return out;
}

}  // namespace

Cplx master_ratio(const SolverConfig& c, const LatticePoint& T, const std::vector<int>& step) {
  const Engine e = build_engine(c, T.base);
  if (static_cast<int>(T.offsets.size()) != e.V || static_cast<int>(step.size()) != e.V)
    throw DomainViolation("lattice point size does not match the shape");
  const auto in_octant = [&](const std::vector<int>& d) {
    for (int v = 0; v < e.V; ++v) {
      if (d[static_cast<std::size_t>(v)] < 0) return false;
      const int p = e.vars[static_cast<std::size_t>(v)].parent;
      if (p >= 0 && d[static_cast<std::size_t>(v)] < d[static_cast<std::size_t>(p)]) return false;
    }
    return true;
  };
  std::vector<int> end = T.offsets;
  for (int v = 0; v < e.V; ++v) end[static_cast<std::size_t>(v)] += step[static_cast<std::size_t>(v)];
  if (!in_octant(T.offsets) || !in_octant(end))
    throw PoleCrossing("step leaves the nonzero-residue octant");

  Cplx r{1.0, 0.0};
  for (int v = 0; v < e.V; ++v)
    r *= std::exp(e.level_log[static_cast<std::size_t>(
             e.vars[static_cast<std::size_t>(v)].level - 1)] *
         double(step[static_cast<std::size_t>(v)]));
  for (const GFac& f : e.gfac) {
    const long k = f.offset(step);
    if (k == 0) continue;
    if (f.singular) {
      long g = f.offset(T.offsets);
      if (k > 0) {
        for (long j = 0; j < k; ++j) r *= double(g + j);
      } else {
        for (long j = 0; j < -k; ++j) r *= -1.0 / (1.0 - double(g - j));
      }
    } else {
      const Cplx a0 = f.c0 + double(f.offset(T.offsets));
      Cplx p{1.0, 0.0};
      if (k > 0)
        for (long j = 0; j < k; ++j) p *= a0 + double(j);
      else
        for (long j = 1; j <= -k; ++j) p /= a0 - double(j);
      r *= f.expo > 0 ? p : Cplx(1.0, 0.0) / p;
    }
  }
  for (const LFac& f : e.lfac) {
    const long k = f.offset(step);
    if (k == 0) continue;
    const Cplx x0 = f.c0 + e.lin_scale * double(f.offset(T.offsets));
    const Cplx x1 = x0 + e.lin_scale * double(k);
    r *= f.expo > 0 ? x1 / x0 : x0 / x1;
  }
  return r;
}

BaseResidue base_residue(const SolverConfig& c, const IndexSet& I) {
  const Engine e = build_engine(c, I);
  BaseResidue b;
  b.q_powers = e.q_powers;
  b.kappa_power = e.kappa_power;
  b.rational_factor = e.rational;
  if (c.model == SeriesModel::quantum) {
    // leading-asymptotics normalization: weight at the base cycle folded in
    const Poly w = fixed_point_weight(c.shape, I, false);
    std::map<VarId, Cplx> pt;
    const std::vector<int> up = I.union_prefix(c.shape.N() - 1);
    for (int j = 1; j < c.shape.N(); ++j) {
      const std::vector<int> lvl = I.union_prefix(j);
      for (int a = 1; a <= c.shape.cum(j); ++a)
        pt[t_var(j, a)] = c.z[static_cast<std::size_t>(lvl[static_cast<std::size_t>(a - 1)] - 1)];
    }
    for (int a = 1; a <= c.shape.n(); ++a) pt[z_var(a)] = c.z[static_cast<std::size_t>(a - 1)];
    pt[h_var()] = c.h;
    const Cplx wv = w.eval(pt);
    b.log_value = e.base_log - e.qf_log + quantum_norm_log(c) + clog(wv);
    b.gamma_args.clear();
    Cplx check = b.log_value;
    for (int i = 1; i <= c.shape.N(); ++i)
      for (int j = i + 1; j <= c.shape.N(); ++j)
        for (int a : I.blocks[static_cast<std::size_t>(i - 1)])
          for (int bb : I.blocks[static_cast<std::size_t>(j - 1)]) {
            const Cplx za = c.z[static_cast<std::size_t>(a - 1)];
            const Cplx zb = c.z[static_cast<std::size_t>(bb - 1)];
            b.gamma_args.emplace_back(Cplx(1.0, 0.0) + (zb - za) / c.kappa, 1);
            b.gamma_args.emplace_back(Cplx(1.0, 0.0) + (za - zb - c.h) / c.kappa, 1);
            check -= log_gamma(Cplx(1.0, 0.0) + (zb - za) / c.kappa);
            check -= log_gamma(Cplx(1.0, 0.0) + (za - zb - c.h) / c.kappa);
          }
    b.value = std::exp(b.log_value);
    b.factored_form_consistent = std::abs(std::exp(check) - Cplx(1.0, 0.0)) < 1e-6;
  } else {
    b.gamma_args = e.gamma_args;
    b.log_value = e.base_log - e.qf_log;
    b.value = std::exp(b.log_value);
    Cplx direct = e.rational;
    for (int k = 0; k < e.kappa_power; ++k) direct *= e.res_scale;
    for (const auto& [arg, ex] : e.gamma_args)
      direct *= std::exp(double(ex) * log_gamma(arg));
    b.factored_form_consistent =
        std::abs(direct - b.value) <= 1e-8 * (std::abs(direct) + std::abs(b.value));
  }
  return b;
}

SolutionVector psi_J(const SolverConfig& c, const IndexSet& J) {
  if (c.model != SeriesModel::dynamical)
    throw DomainViolation("psi_J requires the dynamical model");
  const Engine e = build_engine(c, J);
  const std::vector<IndexSet> labels = enumerate_index_sets(c.shape);
  std::vector<Poly> ws;
  ws.reserve(labels.size());
  for (const IndexSet& I : labels) ws.push_back(w_function(c.shape, I));
  const RunOut r = run_series(e, ws);
  return pack_solution(e, r, omega_log(c), labels);
}

SolutionVector psi_hat(const SolverConfig& c, const IndexSet& I, bool stable) {
  if (c.model != SeriesModel::quantum)
    throw DomainViolation("psi_hat requires the quantum model");
  const Engine e = build_engine(c, I);
  const std::vector<IndexSet> labels = enumerate_index_sets(c.shape);
  std::vector<Poly> ws;
  ws.reserve(labels.size());
  for (const IndexSet& L : labels)
    ws.push_back(stable ? w_function(c.shape, L) : fixed_point_weight(c.shape, L, false));
  const RunOut r = run_series(e, ws);
  return pack_solution(e, r, omega_log(c) + quantum_norm_log(c), labels);
}

SolutionVector flag_limit_solution(const SolverConfig& c, const IndexSet& I) {
  if (c.model != SeriesModel::flag)
    throw DomainViolation("flag_limit_solution requires the flag model");
  const Engine e = build_engine(c, I);
  const std::vector<IndexSet> labels = enumerate_index_sets(c.shape);
  std::vector<Poly> ws;
  ws.reserve(labels.size());
  for (const IndexSet& L : labels) ws.push_back(fixed_point_weight(c.shape, L, true));
  const RunOut r = run_series(e, ws);
  return pack_solution(e, r, flag_norm_log(c, I), labels);
}

double check_dynamical_residual(const SolverConfig& c) {
  if (c.model == SeriesModel::flag)
    throw DomainViolation("dynamical residual is defined for the dynamical and quantum models");
  const WeightModule m(c.shape);
  const bool quantum = c.model == SeriesModel::quantum;
  const double eps = 1e-5;
  const std::map<VarId, Cplx> pt = operator_point(c, quantum);
  std::vector<Mat<Cplx>> X;
  for (int i = 1; i <= c.shape.N(); ++i)
    X.push_back(eval_matrix(quantum ? x_hamiltonian_modified(m, i) : x_hamiltonian(m, i), pt));

  double worst = 0.0;
  for (const IndexSet& fam : m.basis) {
    const std::vector<Cplx> F0 = family_values(c, fam);
    double scale = 0.0;
    for (const Cplx& v : F0) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) continue;
    for (int i = 1; i <= c.shape.N(); ++i) {
      const auto shifted = [&](double sft) {
        SolverConfig cc = c;
        cc.q[static_cast<std::size_t>(i - 1)] *= std::exp(sft);
        return family_values(cc, fam);
      };
      const std::vector<Cplx> fp = shifted(eps), fm = shifted(-eps);
      const std::vector<Cplx> fp2 = shifted(2.0 * eps), fm2 = shifted(-2.0 * eps);
      for (int k = 0; k < m.dim(); ++k) {
        const Cplx d = (8.0 * (fp[static_cast<std::size_t>(k)] - fm[static_cast<std::size_t>(k)]) -
                        (fp2[static_cast<std::size_t>(k)] - fm2[static_cast<std::size_t>(k)])) /
                       (12.0 * eps);
        Cplx xf{};
        for (int l = 0; l < m.dim(); ++l)
          xf += X[static_cast<std::size_t>(i - 1)].at(k, l) * F0[static_cast<std::size_t>(l)];
        worst = std::max(worst, std::abs(c.kappa * d - xf) / scale);
      }
    }
  }
  return worst;
}

double check_qkz_residual(const SolverConfig& c) {
  if (c.model != SeriesModel::dynamical)
    throw DomainViolation("qkz residual requires the dynamical model");
  const WeightModule m(c.shape);
  const std::map<VarId, Cplx> pt = operator_point(c, false);
  double worst = 0.0;
  for (const IndexSet& fam : m.basis) {
    const std::vector<Cplx> F0 = family_values(c, fam);
    double scale = 0.0;
    for (const Cplx& v : F0) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) continue;
    for (int a = 1; a <= c.shape.n(); ++a) {
      const Mat<Cplx> Ka = eval_matrix(qkz_operator(m, a), pt);
      SolverConfig cc = c;
      cc.z[static_cast<std::size_t>(a - 1)] += c.kappa;
      const std::vector<Cplx> Fs = family_values(cc, fam);
      for (int k = 0; k < m.dim(); ++k) {
        Cplx kf{};
        for (int l = 0; l < m.dim(); ++l)
          kf += Ka.at(k, l) * F0[static_cast<std::size_t>(l)];
        worst = std::max(worst, std::abs(Fs[static_cast<std::size_t>(k)] - kf) / scale);
      }
    }
  }
  return worst;
}

ComparisonReport gamma_leading(const SolverConfig& c, const IndexSet& I) {
  if (std::abs(c.kappa - Cplx(1.0, 0.0)) > 1e-12)
    throw DomainViolation("leading asymptotics are normalized at kappa = 1");
  if (c.model == SeriesModel::dynamical)
    throw DomainViolation("leading asymptotics apply to the quantum and flag models");
  const SolutionVector sv =
      c.model == SeriesModel::quantum ? psi_hat(c, I, false) : flag_limit_solution(c, I);
  const std::vector<IndexSet> labels = enumerate_index_sets(c.shape);
  int at = -1;
  for (int k = 0; k < static_cast<int>(labels.size()); ++k)
    if (labels[static_cast<std::size_t>(k)] == I) at = k;
  const SeriesValue& v = sv.entries[static_cast<std::size_t>(at)];
  const Cplx computed = std::exp(v.log_prefactor - q_powers_log(c, v.q_powers)) * v.sum;
  Cplx ex{};
  for (int i = 1; i <= c.shape.N(); ++i)
    for (int j = i + 1; j <= c.shape.N(); ++j)
      for (int a : I.blocks[static_cast<std::size_t>(i - 1)])
        for (int b : I.blocks[static_cast<std::size_t>(j - 1)]) {
          const Cplx za = c.z[static_cast<std::size_t>(a - 1)];
          const Cplx zb = c.z[static_cast<std::size_t>(b - 1)];
          ex += log_gamma(Cplx(1.0, 0.0) + zb - za);
          if (c.model == SeriesModel::quantum)
            ex += log_gamma(Cplx(1.0, 0.0) + za - zb - c.h);
        }
  ComparisonReport rep;
  rep.computed = computed;
  rep.expected = std::exp(ex);
  rep.relative_deviation = std::abs(computed / rep.expected - Cplx(1.0, 0.0));
  return rep;
}

double stirling_gap(const SolverConfig& fc, const IndexSet& I, Cplx h) {
  if (fc.model != SeriesModel::flag)
    throw DomainViolation("stirling_gap compares against a flag-model configuration");
  const Shape& s = fc.shape;
  const int N = s.N();
  const Cplx kt = fc.kappa;

  std::vector<Cplx> lqt(static_cast<std::size_t>(N));
  lqt[static_cast<std::size_t>(N - 1)] = fc.log_q(N);
  for (int i = N - 1; i >= 1; --i)
    lqt[static_cast<std::size_t>(i - 1)] = lqt[static_cast<std::size_t>(i)] -
                                           double(s.part(i) + s.part(i + 1)) * clog(-h) +
                                           fc.log_q(i) - fc.log_q(i + 1);
  std::vector<Cplx> qt(static_cast<std::size_t>(N));
  std::vector<int> br(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    qt[static_cast<std::size_t>(i)] = std::exp(lqt[static_cast<std::size_t>(i)]);
    br[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(
        (lqt[static_cast<std::size_t>(i)].imag() - std::arg(qt[static_cast<std::size_t>(i)])) /
        (2.0 * kPi)));
  }
  const SolverConfig qc(s, fc.z, h, kt, qt, SeriesModel::quantum, fc.trunc, fc.tol, br);
  const SolutionVector qa = psi_hat(qc, I, false);
  const SolutionVector fb = flag_limit_solution(fc, I);

  Cplx et{};
  Cplx sumz{};
  for (const Cplx& za : fc.z) sumz += za;
  for (int i = 1; i < N; ++i) {
    Cplx Si{};
    for (int a : I.union_prefix(i)) Si += fc.z[static_cast<std::size_t>(a - 1)];
    et += double(s.part(i) + s.part(i + 1)) * Si / kt;
  }
  const Cplx scale = et * clog(kt) + double(s.n() - s.part(N)) * (sumz / kt) * clog(-h / kt) -
                     double(s.pair_product()) * log_gamma(Cplx(1.0, 0.0) - h / kt);

  double worst = 0.0;
  for (std::size_t k = 0; k < qa.entries.size(); ++k) {
    const SeriesValue& a = qa.entries[k];
    const SeriesValue& b = fb.entries[k];
    if (std::abs(a.sum) < 1e-280 || std::abs(b.sum) < 1e-280) return 1e300;
    const Cplx diff = scale + a.log_prefactor + clog(a.sum) - b.log_prefactor - clog(b.sum);
    worst = std::max(worst, std::abs(std::exp(diff) - Cplx(1.0, 0.0)));
  }
  return worst;
}

CombinedSolution ktheory_solution(const SolverConfig& c, const LaurentClass& P) {
  if (c.model != SeriesModel::quantum)
    throw DomainViolation("ktheory_solution requires the quantum model");
  const Shape& s = c.shape;
  const int N = s.N();
  const Cplx y = std::exp(2.0 * kPi * kI * c.h / c.kappa);
  std::vector<Cplx> ze(static_cast<std::size_t>(s.n()));
  for (int a = 1; a <= s.n(); ++a)
    ze[static_cast<std::size_t>(a - 1)] =
        std::exp(2.0 * kPi * kI * c.z[static_cast<std::size_t>(a - 1)] / c.kappa);

  // symmetry within every level alphabet is required for a well-defined class
  std::mt19937_64 gen(0x51c3a9d2ull);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<std::vector<Cplx>> tau(static_cast<std::size_t>(std::max(N - 1, 0)));
    for (int j = 1; j < N; ++j) {
      tau[static_cast<std::size_t>(j - 1)].resize(static_cast<std::size_t>(s.cum(j)));
      for (auto& v : tau[static_cast<std::size_t>(j - 1)])
        v = (0.5 + uni(gen)) * std::exp(2.0 * kPi * kI * uni(gen));
    }
    const Cplx base = P(tau, ze, y);
    for (int j = 1; j < N; ++j)
      for (int a = 0; a + 1 < s.cum(j); ++a) {
        auto swapped = tau;
        std::swap(swapped[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(a)],
                  swapped[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(a + 1)]);
        if (std::abs(P(swapped, ze, y) - base) > 1e-8 * (std::abs(base) + 1.0))
          throw SymmetryViolation("class is not symmetric within a level alphabet");
      }
  }

  const std::vector<IndexSet> labels = enumerate_index_sets(s);
  CombinedSolution out;
  out.fixed_points = labels;
  out.values.assign(labels.size(), Cplx{});
  for (const IndexSet& K : labels) {
    std::vector<std::vector<Cplx>> cyc(static_cast<std::size_t>(std::max(N - 1, 0)));
    for (int j = 1; j < N; ++j) {
      const std::vector<int> up = K.union_prefix(j);
      cyc[static_cast<std::size_t>(j - 1)].resize(static_cast<std::size_t>(s.cum(j)));
      for (int a = 0; a < s.cum(j); ++a)
        cyc[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(a)] =
            ze[static_cast<std::size_t>(up[static_cast<std::size_t>(a)] - 1)];
    }
    const Cplx pk = P(cyc, ze, y);
    if (std::abs(pk) == 0.0) continue;
    const SolutionVector sv = psi_hat(c, K, false);
    for (std::size_t l = 0; l < sv.entries.size(); ++l)
      out.values[l] += pk * sv.entries[l].value();
  }
  return out;
}

DetComparisonReport schubert_expansion_determinant(const SolverConfig& c) {
  if (c.model != SeriesModel::quantum)
    throw DomainViolation("schubert_expansion_determinant requires the quantum model");
  const Shape& s = c.shape;
  const int n = s.n();
  const std::vector<IndexSet> labels = enumerate_index_sets(s);
  const int dim = static_cast<int>(labels.size());
  SchubertBasis basis(n);

  const auto flat_eval = [&](const Poly& p, const IndexSet& K, bool exponentiate) {
    std::map<VarId, Cplx> pt;
    int m = 1;
    for (const auto& block : K.blocks)
      for (int a : block) {
        const Cplx zv = c.z[static_cast<std::size_t>(a - 1)];
        pt[x_var(m)] = exponentiate ? std::exp(2.0 * kPi * kI * zv / c.kappa) : zv;
        ++m;
      }
    return p.eval(pt);
  };

  const auto det_at = [&](const SolverConfig& cc) {
    Eigen::MatrixXcd vals(dim, dim);
    for (int k = 0; k < dim; ++k) {
      const SolutionVector sv = psi_hat(cc, labels[static_cast<std::size_t>(k)], false);
      for (int l = 0; l < dim; ++l)
        vals(k, l) = sv.entries[static_cast<std::size_t>(l)].value();
    }
    Eigen::MatrixXcd coef(dim, dim);  // coef(i,k): class i at the exponentiated cycle of k
    Eigen::MatrixXcd M(dim, dim);     // M(l,j): class j at the plain cycle of l
    for (int i = 0; i < dim; ++i) {
      const Poly A = basis.at(sigma_up(labels[static_cast<std::size_t>(i)]));
      for (int k = 0; k < dim; ++k) {
        coef(i, k) = flat_eval(A, labels[static_cast<std::size_t>(k)], true);
        M(k, i) = flat_eval(A, labels[static_cast<std::size_t>(k)], false);
      }
    }
    const Eigen::MatrixXcd rhs = coef * vals;           // rhs(i,l)
    const Eigen::MatrixXcd ct = M.fullPivLu().solve(rhs.transpose());
    return Cplx(ct.determinant());
  };

  DetComparisonReport rep;
  rep.determinant = det_at(c);

  Cplx flog{};
  Cplx sumz{};
  for (const Cplx& za : c.z) sumz += za;
  for (int i = 1; i <= s.N(); ++i)
    for (int j = i + 1; j <= s.N(); ++j)
      flog += c.h * double(std::min(s.part(i), s.part(j))) / c.kappa *
              clog(Cplx(1.0, 0.0) -
                   c.q[static_cast<std::size_t>(i - 1)] / c.q[static_cast<std::size_t>(j - 1)]);
  for (int i = 1; i <= s.N(); ++i)
    flog += double(s.moved_basis_size(i)) * (sumz / c.kappa) * c.log_q(i);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      if (a != b)
        flog += double(s.det_exponent()) *
                (clog(2.0 * kPi * kI) +
                 log_gamma(Cplx(1.0, 0.0) +
                           (c.z[static_cast<std::size_t>(a - 1)] -
                            c.z[static_cast<std::size_t>(b - 1)] - c.h) /
                               c.kappa));
  rep.formula = std::exp(flog);
  rep.ratio = rep.determinant / rep.formula;

  const double scales[3] = {1.0, 0.6, 0.3};
  for (double sc : scales) {
    SolverConfig cc = c;
    for (int i = 1; i <= s.N(); ++i)
      cc.q[static_cast<std::size_t>(i - 1)] *= std::pow(sc, double(s.N() - i));
    const Cplx d = sc == 1.0 ? rep.determinant : det_at(cc);
    Cplx qdep{};
    for (int i = 1; i <= s.N(); ++i)
      for (int j = i + 1; j <= s.N(); ++j)
        qdep += c.h * double(std::min(s.part(i), s.part(j))) / c.kappa *
                clog(Cplx(1.0, 0.0) - cc.q[static_cast<std::size_t>(i - 1)] /
                                          cc.q[static_cast<std::size_t>(j - 1)]);
    for (int i = 1; i <= s.N(); ++i)
      qdep += double(s.moved_basis_size(i)) * (sumz / c.kappa) *
              (cc.log_q(i) + double(s.N() - i) * clog(Cplx(sc, 0.0)));
    rep.normalized.push_back(d * std::exp(-qdep));
  }
  double spread = 0.0;
  for (const Cplx& a : rep.normalized)
    for (const Cplx& b : rep.normalized)
      if (std::abs(b) > 0.0) spread = std::max(spread, std::abs(a / b - Cplx(1.0, 0.0)));
  rep.q_independence = spread;
  return rep;
}

double formal_integral_residual(const SolverConfig& c, const IndexSet& J) {
  const Engine e = build_engine(c, J);
  if (e.V == 0) return 0.0;
  Poly g(Rat(3));
  for (const VarNode& v : e.vars) g += Poly::var(t_var(v.level, v.slot), 2);
  const FastPoly fg = compile_weight(g, e);

  const int n = c.shape.n();
  std::vector<Cplx> vals(static_cast<std::size_t>(e.V + n + 1));
  for (int a = 1; a <= n; ++a)
    vals[static_cast<std::size_t>(e.V + a - 1)] = c.z[static_cast<std::size_t>(a - 1)];
  vals[static_cast<std::size_t>(e.V + n)] = c.h;
  const auto gval = [&](const std::vector<int>& d) {
    for (int v = 0; v < e.V; ++v)
      vals[static_cast<std::size_t>(v)] =
          c.z[static_cast<std::size_t>(e.vars[static_cast<std::size_t>(v)].anchor - 1)] +
          e.t_shift * double(d[static_cast<std::size_t>(v)]);
    return eval_fast(fg, vals);
  };

  std::map<std::vector<int>, Cplx> all;
  std::map<std::vector<int>, Cplx> shell;
  shell[std::vector<int>(static_cast<std::size_t>(e.V), 0)] = Cplx(1.0, 0.0);
  all = shell;
  for (int sidx = 1; sidx <= c.trunc; ++sidx) {
    std::map<std::vector<int>, Cplx> next;
    for (const auto& [d, tv] : shell) {
      for (int v = 0; v < e.V; ++v) {
        if (!step_allowed(e, d, v)) continue;
        std::vector<int> nd = d;
        ++nd[static_cast<std::size_t>(v)];
        if (next.count(nd)) continue;
        next.emplace(std::move(nd), tv * unit_step(e, d, v, +1));
      }
    }
    if (next.empty()) break;
    all.insert(next.begin(), next.end());
    shell.swap(next);
  }

  double scale = 0.0;
  for (const auto& [d, tv] : all) scale += std::abs(tv * gval(d));
  if (scale == 0.0) return 0.0;

  double worst = 0.0;
  for (int v = 0; v < e.V; ++v) {
    Cplx acc{};
    for (const auto& [d, tv] : all) {
      std::vector<int> dn = d;
      --dn[static_cast<std::size_t>(v)];
      // the singular factor vanishes on octant exits, keeping the sum exact
      const Cplx up = unit_step(e, d, v, -1);
      const Cplx shifted = dn[static_cast<std::size_t>(v)] >= 0 ? up * gval(dn) : Cplx{};
      acc += tv * (shifted - gval(d));
    }
    worst = std::max(worst, std::abs(acc) / scale);
  }
  return worst;
}

double formal_integral_linearity(const SolverConfig& c, const IndexSet& J) {
  const Engine e = build_engine(c, J);
  Poly f(Rat(1));
  Poly g(Rat(2));
  for (const VarNode& v : e.vars) {
    f += Poly::var(t_var(v.level, v.slot), 1);
    g += Poly::var(t_var(v.level, v.slot), 2) * Rat(-1, 2);
  }
  Poly combo = f * Rat(2) + g * Rat(-1, 3);
  const RunOut r = run_series(e, {f, g, combo});
  const Cplx lhs = r.sums[2];
  const Cplx rhs = 2.0 * r.sums[0] - r.sums[1] / 3.0;
  const double scale = std::abs(r.sums[0]) + std::abs(r.sums[1]) + 1e-300;
  return std::abs(lhs - rhs) / scale;
}

Cplx hyper2f1(Cplx a, Cplx b, Cplx c, Cplx x) {
  Cplx sum{1.0, 0.0};
  Cplx term{1.0, 0.0};
  int small = 0;
  for (int m = 0; m < 4000; ++m) {
    term *= (a + double(m)) * (b + double(m)) / ((c + double(m)) * double(m + 1)) * x;
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1.0)) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  return sum;
}

}  // namespace qde
