#include "pkattract/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pkattract/ergodic.hpp"
#include "pkattract/error.hpp"
#include "pkattract/green.hpp"
#include "pkattract/io.hpp"
#include "pkattract/trapping.hpp"
#include "pkattract/verification.hpp"

namespace pkattract {

namespace {

using json = nlohmann::ordered_json;

struct Common {
  int k = 2;
  double lambda_re = 0.01;
  double lambda_im = 0.0;
  double rho = 0.0;  // 0: default_rho(lambda)
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
  c.out = default_out;
  sub->add_option("--k", c.k, "base dimension + 1 (f_lambda acts on P^k)")->check(CLI::Range(2, 8));
  sub->add_option("--lambda-re", c.lambda_re, "Re(lambda)");
  sub->add_option("--lambda-im", c.lambda_im, "Im(lambda)");
  sub->add_option("--rho", c.rho, "trapping radius; default sqrt(2)|lambda|^(3/4)");
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
  sub->add_option("--out", c.out, "output path")->capture_default_str();
}

cplx lambda_of(const Common& c) { return {c.lambda_re, c.lambda_im}; }

/// Validates |lambda| and rho; every subcommand goes through this.
Params params_of(const Common& c) {
  const cplx lam = lambda_of(c);
  const double rho = c.rho > 0.0 ? c.rho : default_rho(lam);
  Params p = Params::make(c.k, lam, rho);
  if (std::abs(lam) > kSmallLambda)
    std::cerr << "note: |lambda| = " << std::abs(lam) << " is outside the calibrated range (<= " << kSmallLambda
              << "); results are advisory\n";
  return p;
}

RunManifest manifest_of(const std::string& command, const std::vector<std::string>& argv, const Common& c,
                        const Params& p) {
  RunManifest m;
  m.command = command;
  m.argv = argv;
  m.k = c.k;
  m.lambda_re = c.lambda_re;
  m.lambda_im = c.lambda_im;
  m.rho = p.rho;
  m.seed = c.seed;
  m.workers = c.workers;
  return m;
}

void finish(RunManifest& m, const std::vector<std::string>& artifacts, const std::string& manifest_path) {
  for (const auto& a : artifacts) m.add_artifact(a);
  m.write(manifest_path);
  std::cout << "manifest: " << manifest_path << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Usage, "cannot write '" + path + "'");
  os << text;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// "re,im,re,im,..." -> point.
ProjPoint parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') throw Error(ErrorCode::Usage, "bad number '" + tok + "' in point");
    v.push_back(x);
  }
  if (v.size() < 4 || v.size() % 2 != 0) throw Error(ErrorCode::Usage, "point needs re,im pairs for >= 2 coords");
  CVec c;
  for (std::size_t i = 0; i < v.size(); i += 2) c.emplace_back(v[i], v[i + 1]);
  if (max_norm(c) == 0.0) throw Error(ErrorCode::Usage, "point is zero");
  return ProjPoint(std::move(c));
}

ProjPoint random_point(int dim, Rng& rng) {
  CVec c(static_cast<std::size_t>(dim) + 1);
  c[0] = 1.0;
  for (int i = 1; i <= dim; ++i) c[static_cast<std::size_t>(i)] = uniform_disc(rng, 1.0);
  return ProjPoint(std::move(c));
}

/// "coord:re|im:lo:hi".
HistogramAxis parse_axis(const std::string& s) {
  std::vector<std::string> f;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) f.push_back(tok);
  if (f.size() != 4 || (f[1] != "re" && f[1] != "im"))
    throw Error(ErrorCode::Usage, "axis must look like coord:re|im:lo:hi, got '" + s + "'");
  HistogramAxis a;
  try {
    a.coord = std::stoi(f[0]);
    a.lo = std::stod(f[2]);
    a.hi = std::stod(f[3]);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Usage, "bad axis '" + s + "'");
  }
  a.imag = f[1] == "im";
  return a;
}

/// Invariant-measure sample for a map id: mu0 for the base map, mu_lambda
/// for f_lambda.
Cloud reference_cloud(MapId id, const Params& p, int n, std::uint64_t seed, int workers) {
  if (id == MapId::Base) return sample_mu0(p.k, 30, n, seed, workers);
  if (id == MapId::FLambda) return sample_mu_lambda(p, 40, n, seed, workers);
  throw Error(ErrorCode::Usage, "map must be base or f_lambda here");
}

struct Subcommand {
  CLI::App* app = nullptr;
  Common common;
  std::function<int(const std::vector<std::string>&)> run;
};

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"pkattract: attractors of f_lambda on P^k"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Subcommand>> subs;
  auto make = [&](const std::string& name, const std::string& help, const std::string& default_out) {
    auto s = std::make_unique<Subcommand>();
    s->app = app.add_subcommand(name, help);
    add_common(s->app, s->common, default_out);
    subs.push_back(std::move(s));
    return subs.back().get();
  };

  // iterate -------------------------------------------------------------
  std::string it_map = "f_lambda", it_start;
  int it_steps = 100;
  {
    Subcommand* s = make("iterate", "forward orbit of one point", "orbit.csv");
    s->app->add_option("--map", it_map, "base|f_lambda|g_lambda|h|identity")->capture_default_str();
    s->app->add_option("--start", it_start, "start point as re,im pairs; default random");
    s->app->add_option("--steps", it_steps)->check(CLI::Range(0, 10000000))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      MapId id = parse_map_id(it_map);
      MapPtr map = make_map(id, p.k, p.lambda);
      Rng rng = make_stream(s->common.seed, 0);
      ProjPoint x;
      if (!it_start.empty()) {
        x = parse_point(it_start);
      } else if (id == MapId::FLambda) {
        x = sample_trap_point(p, rng);
      } else {
        x = random_point(map->dim(), rng);
        if (id == MapId::GLambda) {
          CVec c = x.coords();
          for (int j = 2; j < p.k; ++j) c[static_cast<std::size_t>(j)] = c[1];
          x = ProjPoint(std::move(c));
        }
      }
      if (x.dim() != map->dim())
        throw Error(ErrorCode::DimensionMismatch, "start point has dimension " + std::to_string(x.dim()) +
                                                      ", map acts on P^" + std::to_string(map->dim()));
      std::vector<ProjPoint> orbit{normalize(x)};
      for (int i = 0; i < it_steps; ++i) orbit.push_back(normalize(map->apply(orbit.back())));
      Cloud c = Cloud::uniform(map->dim(), std::move(orbit));
      write_cloud_csv(c, s->common.out);
      RunManifest m = manifest_of("iterate", argv, s->common, p);
      m.sizes["steps"] = it_steps;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      return kExitOk;
    };
  }

  // attractor -----------------------------------------------------------
  std::string at_method = "forward";
  int at_samples = 100000, at_burn = 30, at_depth = 40;
  {
    Subcommand* s = make("attractor", "sample the attractor K_lambda", "cloud.csv");
    s->app->add_option("--samples", at_samples)->check(CLI::Range(1, 100000000))->capture_default_str();
    s->app->add_option("--method", at_method, "forward (orbits from U_rho) | history (phi_lambda of mu0 histories)")
        ->check(CLI::IsMember({"forward", "history"}))
        ->capture_default_str();
    s->app->add_option("--burn-in", at_burn, "forward method")->check(CLI::Range(20, 100000))->capture_default_str();
    s->app->add_option("--depth", at_depth, "history method")->check(CLI::Range(1, 200))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      Cloud c = at_method == "forward"
                    ? sample_attractor_forward(p, at_burn, at_samples, s->common.seed, s->common.workers)
                    : sample_mu_lambda(p, at_depth, at_samples, s->common.seed, s->common.workers);
      std::size_t outside = 0;
      for (const auto& x : c.points)
        if (!in_trap(p, x).inside) ++outside;
      write_cloud_csv(c, s->common.out);
      RunManifest m = manifest_of("attractor", argv, s->common, p);
      m.sizes["samples"] = static_cast<long long>(c.size());
      m.sizes[at_method == "forward" ? "burn_in" : "depth"] = at_method == "forward" ? at_burn : at_depth;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      std::cout << c.size() << " points, " << outside << " outside U_rho\n";
      return outside == 0 ? kExitOk : kExitCheckFailed;
    };
  }

  // green ---------------------------------------------------------------
  std::string gr_map = "f_lambda";
  int gr_samples = 1000, gr_iter = 60;
  {
    Subcommand* s = make("green", "Green function G and the residual |G(F x) - 2 G(x)|", "green.csv");
    s->app->add_option("--map", gr_map, "base|f_lambda|h")->capture_default_str();
    s->app->add_option("--samples", gr_samples, "random lifts")->check(CLI::Range(1, 10000000))->capture_default_str();
    s->app->add_option("--iterations", gr_iter)->check(CLI::Range(1, 2000))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      MapPtr map = make_map(parse_map_id(gr_map), p.k, p.lambda);
      Rng rng = make_stream(s->common.seed, 0);
      const int n = map->dim() + 1;
      std::string csv;
      for (int i = 0; i < n; ++i) csv += "c" + std::to_string(i) + "_re,c" + std::to_string(i) + "_im,";
      csv += "green,residual\n";
      double worst = 0.0;
      for (int s_i = 0; s_i < gr_samples; ++s_i) {
        CVec x(static_cast<std::size_t>(n));
        const double scale = std::exp(4.0 * uniform01(rng) - 2.0);
        for (auto& c : x) c = scale * uniform_disc(rng, 1.0);
        const double g = green_function(*map, x, gr_iter);
        const double gf = green_function(*map, map->lift(x), gr_iter);
        const double r = std::abs(gf - map->degree() * g);
        worst = std::max(worst, r);
        for (const auto& c : x) csv += fmt17(c.real()) + "," + fmt17(c.imag()) + ",";
        csv += fmt17(g) + "," + fmt17(r) + "\n";
      }
      write_text(s->common.out, csv);
      RunManifest m = manifest_of("green", argv, s->common, p);
      m.sizes["samples"] = gr_samples;
      m.sizes["iterations"] = gr_iter;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      std::cout << "max |G(F x) - d G(x)| = " << worst << "\n";
      return worst < 1e-8 ? kExitOk : kExitCheckFailed;
    };
  }

  // preimages -----------------------------------------------------------
  std::string pre_map = "f_lambda", pre_target;
  int pre_depth = 1;
  {
    Subcommand* s = make("preimages", "all backward images of a target", "preimages.csv");
    s->app->add_option("--map", pre_map, "base|f_lambda")->capture_default_str();
    s->app->add_option("--target", pre_target, "target as re,im pairs; default random");
    s->app->add_option("--depth", pre_depth)->check(CLI::Range(1, 8))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      MapId id = parse_map_id(pre_map);
      if (id != MapId::Base && id != MapId::FLambda) throw Error(ErrorCode::Usage, "--map must be base or f_lambda");
      MapPtr map = make_map(id, p.k, p.lambda);
      Rng rng = make_stream(s->common.seed, 0);
      ProjPoint target = pre_target.empty() ? random_point(map->dim(), rng) : parse_point(pre_target);
      if (target.dim() != map->dim()) throw Error(ErrorCode::DimensionMismatch, "target dimension mismatch");
      std::vector<Preimage> level{{target, 1}};
      for (int d = 0; d < pre_depth; ++d) {
        std::vector<Preimage> next;
        for (const auto& q : level) {
          auto pre = id == MapId::Base ? preimages_f_base(p.k, q.point) : preimages_f_lambda(p, q.point);
          for (auto& r : pre) next.push_back({r.point, r.multiplicity * q.multiplicity});
        }
        level = std::move(next);
      }
      long long total = 0;
      double worst = 0.0;
      Cloud c;
      c.dim = map->dim();
      for (const auto& q : level) {
        total += q.multiplicity;
        worst = std::max(worst, fs_distance(map->iterate(q.point, pre_depth), target));
        c.points.push_back(q.point);
        c.weights.push_back(static_cast<double>(q.multiplicity));
      }
      c.normalize_weights();
      long long expected = 1;
      const long long per_step = id == MapId::Base ? (1LL << (p.k - 1)) : (1LL << p.k);
      for (int d = 0; d < pre_depth; ++d) expected *= per_step;
      write_cloud_csv(c, s->common.out);
      RunManifest m = manifest_of("preimages", argv, s->common, p);
      m.sizes["depth"] = pre_depth;
      m.sizes["preimages"] = total;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      std::cout << total << " preimages with multiplicity (expected " << expected << "), max forward residual "
                << worst << "\n";
      return total == expected && worst < 1e-10 ? kExitOk : kExitCheckFailed;
    };
  }

  // periodic ------------------------------------------------------------
  std::string per_map = "base";
  int per_n = 4;
  {
    Subcommand* s = make("periodic", "points of period n (base map or their lifts to K_lambda)", "periodic.csv");
    s->app->add_option("--map", per_map, "base|f_lambda")->capture_default_str();
    s->app->add_option("--n", per_n)->check(CLI::Range(1, 16))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      MapId id = parse_map_id(per_map);
      if (id != MapId::Base && id != MapId::FLambda) throw Error(ErrorCode::Usage, "--map must be base or f_lambda");
      PeriodicSet set = periodic_points_base(p.k, per_n);
      if (id == MapId::FLambda) set = lift_periodic_set(p, set);
      Cloud c;
      c.dim = id == MapId::Base ? p.k - 1 : p.k;
      long long total = 0;
      for (std::size_t i = 0; i < set.points.size(); ++i) {
        c.points.push_back(set.points[i]);
        c.weights.push_back(static_cast<double>(set.multiplicities[i]));
        total += set.multiplicities[i];
      }
      c.normalize_weights();
      write_cloud_csv(c, s->common.out);
      RunManifest m = manifest_of("periodic", argv, s->common, p);
      m.sizes["n"] = per_n;
      m.sizes["points"] = total;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      std::cout << total << " periodic points of period " << per_n;
      if (set.expected_count) std::cout << " (expected " << *set.expected_count << ")";
      std::cout << "\n";
      return set.incomplete ? kExitCheckFailed : kExitOk;
    };
  }

  // lyapunov ------------------------------------------------------------
  std::string ly_map = "f_lambda";
  int ly_orbits = 100, ly_length = 2000;
  {
    Subcommand* s = make("lyapunov", "Lyapunov exponents along typical orbits", "lyapunov.json");
    s->app->add_option("--map", ly_map, "base|f_lambda")->capture_default_str();
    s->app->add_option("--orbits", ly_orbits)->check(CLI::Range(2, 100000))->capture_default_str();
    s->app->add_option("--length", ly_length)->check(CLI::Range(1, 10000000))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      MapId id = parse_map_id(ly_map);
      Cloud starts = reference_cloud(id, p, ly_orbits, s->common.seed, s->common.workers);
      MapPtr map = make_map(id, p.k, p.lambda);
      LyapunovReport r = lyapunov_from_starts(*map, starts.points, ly_length, s->common.workers);
      json j{{"map", map->name()},
             {"orbits", r.orbit_count},
             {"orbit_length", r.orbit_length},
             {"exponents", r.exponents},
             {"standard_errors", r.standard_errors}};
      write_text(s->common.out, j.dump(2) + "\n");
      RunManifest m = manifest_of("lyapunov", argv, s->common, p);
      m.sizes["orbits"] = ly_orbits;
      m.sizes["length"] = ly_length;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      for (std::size_t i = 0; i < r.exponents.size(); ++i)
        std::cout << "chi_" << i + 1 << " = " << r.exponents[i] << " +- " << r.standard_errors[i] << "\n";
      return kExitOk;
    };
  }

  // entropy -------------------------------------------------------------
  std::string en_method = "periodic", en_map = "f_lambda";
  int en_samples = 20000, en_nmax = 8;
  std::vector<double> en_eps{0.2, 0.1};
  {
    Subcommand* s = make("entropy", "entropy estimates", "entropy.json");
    s->app->add_option("--method", en_method, "periodic|spanning|bk")
        ->check(CLI::IsMember({"periodic", "spanning", "bk"}))
        ->capture_default_str();
    s->app->add_option("--map", en_map, "base|f_lambda (spanning, bk)")->capture_default_str();
    s->app->add_option("--samples", en_samples)->check(CLI::Range(10, 10000000))->capture_default_str();
    s->app->add_option("--n-max", en_nmax, "largest n")->check(CLI::Range(3, 16))->capture_default_str();
    s->app->add_option("--eps", en_eps, "scales (spanning: all, bk: first)");
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      json j{{"method", en_method}};
      if (en_method == "periodic") {
        std::vector<std::pair<int, double>> counts;
        json rows = json::array();
        for (int n = 1; n <= en_nmax; ++n) {
          PeriodicSet set = periodic_points_base(p.k, n);
          long long total = 0;
          for (int mlt : set.multiplicities) total += mlt;
          if (set.incomplete) throw Error(ErrorCode::IncompleteEnumeration, "period " + std::to_string(n));
          counts.emplace_back(n, static_cast<double>(total));
          rows.push_back({{"n", n}, {"count", total}});
        }
        j["counts"] = rows;
        j["slope"] = entropy_from_periodic_growth(counts);
      } else {
        MapId id = parse_map_id(en_map);
        Cloud c = reference_cloud(id, p, en_samples, s->common.seed, s->common.workers);
        MapPtr map = make_map(id, p.k, p.lambda);
        j["map"] = map->name();
        if (en_method == "spanning") {
          OrbitBundle ob = make_orbits(*map, c.points, en_nmax, s->common.workers);
          std::vector<int> ns;
          for (int n = 1; n <= en_nmax; ++n) ns.push_back(n);
          SpanningReport r = topological_entropy_estimate(ob, ns, en_eps);
          json per = json::array();
          for (std::size_t e = 0; e < r.eps_values.size(); ++e)
            per.push_back({{"eps", r.eps_values[e]},
                           {"counts", r.counts[e]},
                           {"slope", std::isfinite(r.slopes[e]) ? json(r.slopes[e]) : json(nullptr)},
                           {"fitted_points", r.fitted_points[e]}});
          j["n_values"] = ns;
          j["estimates"] = per;
        } else {
          if (en_eps.empty()) throw Error(ErrorCode::Usage, "--eps needs a value");
          BrinKatokReport r = brin_katok_entropy(c, *map, en_nmax, en_eps.front(), 200, s->common.seed + 1, 3,
                                                 s->common.workers);
          j["n"] = en_nmax;
          j["eps"] = en_eps.front();
          j["plain"] = r.plain;
          j["differenced"] = r.differenced;
          j["std_error"] = r.std_error;
          j["centers_used"] = r.centers_used;
          j["empty_balls"] = r.empty_balls;
        }
      }
      write_text(s->common.out, j.dump(2) + "\n");
      RunManifest m = manifest_of("entropy", argv, s->common, p);
      m.sizes["n_max"] = en_nmax;
      if (en_method != "periodic") m.sizes["samples"] = en_samples;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    };
  }

  // mixing --------------------------------------------------------------
  std::string mx_map = "f_lambda";
  int mx_samples = 100000, mx_nmax = 12, mx_trials = 1000;
  {
    Subcommand* s = make("mixing", "chart-bump correlations and sensitivity", "mixing.json");
    s->app->add_option("--map", mx_map, "base|f_lambda")->capture_default_str();
    s->app->add_option("--samples", mx_samples)->check(CLI::Range(10, 100000000))->capture_default_str();
    s->app->add_option("--n-max", mx_nmax)->check(CLI::Range(0, 200))->capture_default_str();
    s->app->add_option("--trials", mx_trials, "sensitivity pairs")->check(CLI::Range(1, 1000000))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      MapId id = parse_map_id(mx_map);
      Cloud c = reference_cloud(id, p, mx_samples, s->common.seed, s->common.workers);
      MapPtr map = make_map(id, p.k, p.lambda);
      const int dim = map->dim();
      CVec c1(static_cast<std::size_t>(dim), 0.0), c2(static_cast<std::size_t>(dim), 0.0);
      c1[0] = 0.5;
      c2[0] = cplx(-0.3, 0.4);
      Observable phi = chart_bump(0, c1), psi = chart_bump(0, c2);
      json rows = json::array();
      for (int n = 0; n <= mx_nmax; ++n) {
        CorrelationEstimate e = correlation(c, *map, phi, psi, n, s->common.workers);
        rows.push_back({{"n", n}, {"value", e.value}, {"std_error", e.std_error}});
      }
      SensitivityReport sr = sensitivity_probe(
          *map, [&c](Rng& g) { return c.points[g() % c.size()]; }, 1e-3, 50, mx_trials, s->common.seed + 1);
      json j{{"map", map->name()},
             {"correlations", rows},
             {"sensitivity", {{"trials", sr.trials}, {"separated_fraction", sr.separated_fraction}}}};
      write_text(s->common.out, j.dump(2) + "\n");
      RunManifest m = manifest_of("mixing", argv, s->common, p);
      m.sizes["samples"] = mx_samples;
      m.sizes["n_max"] = mx_nmax;
      m.sizes["trials"] = mx_trials;
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      std::cout << "C_" << mx_nmax << " = " << rows.back()["value"] << " +- " << rows.back()["std_error"]
                << ", separated fraction " << sr.separated_fraction << "\n";
      return kExitOk;
    };
  }

  // verify --------------------------------------------------------------
  int vf_trials = 100;
  bool vf_witness = false;
  std::size_t vf_witness_n = 4000;
  {
    Subcommand* s = make("verify", "numerical lemma checks", "verify.json");
    s->app->add_option("--trials", vf_trials, "targets per degree check")->check(CLI::Range(1, 100000))->capture_default_str();
    s->app->add_flag("--nonalgebraicity", vf_witness, "also run the nonalgebraicity witness");
    s->app->add_option("--witness-samples", vf_witness_n)->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      const Precision prec = precision_from_env();
      std::vector<LemmaReport> reports;
      reports.push_back(check_fixed_line(p.lambda, p.rho, p.k, prec));
      reports.push_back(check_preimage_escape(p.lambda, p.rho, p.k, prec));
      if (std::abs(p.lambda) < kSmallLambda) reports.push_back(check_hyperbolic_eigenvalues(p.lambda, p.k));
      reports.push_back(topological_degree_check(MapId::Base, InvariantSet::Pi, p.k, p.lambda, vf_trials,
                                                 s->common.seed));
      reports.push_back(topological_degree_check(MapId::FLambda, InvariantSet::L, p.k, p.lambda, vf_trials,
                                                 s->common.seed + 1));
      reports.push_back(topological_degree_check(MapId::FLambda, InvariantSet::Pk, p.k, p.lambda, vf_trials,
                                                 s->common.seed + 2));
      reports.push_back(to_lemma_report(critical_orbit_trace(p.k, 200, 8, s->common.seed + 3)));
      if (vf_witness)
        reports.push_back(to_lemma_report(nonalgebraicity_witness(p, vf_witness_n, 6, s->common.seed + 4)));
      write_text(s->common.out, lemma_reports_json(reports));
      RunManifest m = manifest_of("verify", argv, s->common, p);
      m.sizes["trials"] = vf_trials;
      m.sizes["precision_bits"] = precision_bits(prec);
      if (vf_witness) m.sizes["witness_samples"] = static_cast<long long>(vf_witness_n);
      finish(m, {s->common.out}, s->common.out + ".manifest.json");
      bool all = true;
      for (const auto& r : reports) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.lemma_id << "  min_residual=" << r.min_residual
                  << " threshold=" << r.threshold << (r.advisory ? " (advisory)" : "") << "\n";
        all = all && r.passed;
      }
      return all ? kExitOk : kExitCheckFailed;
    };
  }

  // render --------------------------------------------------------------
  std::string rd_in, rd_x, rd_y;
  int rd_chart = -1, rd_nx = 512, rd_ny = 512, rd_samples = 200000;
  {
    Subcommand* s = make("render", "density image of a cloud in a chart window", "render");
    s->app->add_option("--in", rd_in, "cloud CSV; default: sample the slice M = K_lambda on W");
    s->app->add_option("--samples", rd_samples, "when sampling")->check(CLI::Range(1, 100000000))->capture_default_str();
    s->app->add_option("--chart", rd_chart, "chart index; default 1");
    s->app->add_option("--x", rd_x, "coord:re|im:lo:hi; default 0:re:-2:2");
    s->app->add_option("--y", rd_y, "coord:re|im:lo:hi; default k:re:-0.02:0.04");
    s->app->add_option("--nx", rd_nx)->check(CLI::Range(1, 4096))->capture_default_str();
    s->app->add_option("--ny", rd_ny)->check(CLI::Range(1, 4096))->capture_default_str();
    s->run = [&, s](const std::vector<std::string>& argv) {
      Params p = params_of(s->common);
      Cloud c = rd_in.empty() ? sample_m_lambda(p, static_cast<std::size_t>(rd_samples), s->common.seed)
                              : read_cloud_csv(rd_in);
      HistogramWindow w;
      w.chart = rd_chart >= 0 ? rd_chart : 1;
      w.x = rd_x.empty() ? HistogramAxis{0, false, -2.0, 2.0} : parse_axis(rd_x);
      w.y = rd_y.empty() ? HistogramAxis{c.dim, false, -0.02, 0.04} : parse_axis(rd_y);
      w.nx = rd_nx;
      w.ny = rd_ny;
      const std::string prefix = s->common.out;
      HistogramSummary h = write_histogram(c, w, prefix);
      RunManifest m = manifest_of("render", argv, s->common, p);
      m.sizes["points"] = static_cast<long long>(c.size());
      m.sizes["in_window"] = static_cast<long long>(h.in_window);
      m.sizes["out_of_window"] = static_cast<long long>(h.out_of_window);
      m.sizes["nx"] = rd_nx;
      m.sizes["ny"] = rd_ny;
      finish(m, {prefix + ".pgm", prefix + ".counts.csv"}, prefix + ".manifest.json");
      std::cout << h.in_window << " in window, " << h.out_of_window << " outside, " << h.nonzero_cells
                << " nonzero cells\n";
      if (h.empty_window) std::cerr << "warning: " << to_string(ErrorCode::EmptyWindow) << ": over 99% of the cloud lies outside the window\n";
      return kExitOk;
    };
  }

  try {
    std::vector<const char*> cargv{"pkattract"};
    for (const auto& a : args) cargv.push_back(a.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  for (auto& s : subs) {
    if (!s->app->parsed()) continue;
    try {
      return s->run(args);
    } catch (const Error& e) {
      std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
      switch (e.code()) {
        case ErrorCode::Usage:
        case ErrorCode::InvalidParams:
        case ErrorCode::LambdaOutOfRange:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::MalformedRow:
          std::cerr << s->app->help();
          return kExitUsage;
        default:
          return kExitCheckFailed;
      }
    }
  }
  return kExitUsage;
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args);
}

}  // namespace pkattract
