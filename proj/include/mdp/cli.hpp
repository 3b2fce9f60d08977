#pragma once

// Command-line front end. Every command prints one `key: value` pair per line
// followed by a `summary:` line, and returns an ExitStatus.
//
//   mdp check    --scenario F | --domain F --centers F --s S [--tol T]
//   mdp mst      --centers F
//   mdp prongs   --segment L | --polyline F, --s S, --n N | --beta B [--out-dir D]
//   mdp optimize --domain F --s S [--n-max --iters --seed --restarts --out F --svg F]
//   mdp serve    [--host H] [--port P] [--domain F]

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mdp/constructive.hpp"
#include "mdp/coverage.hpp"
#include "mdp/errors.hpp"
#include "mdp/http_service.hpp"
#include "mdp/io.hpp"
#include "mdp/optimizer.hpp"
#include "mdp/session.hpp"
#include "mdp/spanning.hpp"

namespace mdp::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kUncovered = 1,  ///< uncovered, unknown, or no feasible configuration
  kInvalidInput = 2,
  kToleranceFailure = 3,
};

namespace detail {

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

inline std::string num(double x) {
  if (std::isfinite(x)) return io::format_number(x);
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline std::string pair(Point2 p) { return io::format_number(p.x) + " " + io::format_number(p.y); }

inline void kv(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << ": " << value << "\n";
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  f << text;
  if (!f) throw InvalidInput("failed writing " + path.string());
}

inline void report_verdict(std::ostream& out, const CoverageVerdict& v) {
  kv(out, "status", to_string(v.status));
  kv(out, "margin", num(v.margin));
  kv(out, "tolerance", num(v.tolerance));
  kv(out, "cells", std::to_string(v.cells));
  if (v.witness) kv(out, "witness", pair(*v.witness));
}

}  // namespace detail

struct CheckArgs {
  std::string scenario;
  std::string domain;
  std::string centers;
  std::optional<double> s;
  double tol = 0.0;
};

inline int cmd_check(const CheckArgs& a, std::ostream& out) {
  using detail::kv;
  std::optional<double> s = a.s;
  std::vector<Point2> centers;
  auto load = [&] {
    if (!a.scenario.empty()) {
      io::Scenario sc = io::load_scenario_file(a.scenario);
      centers = sc.centers;
      if (!s) s = sc.s;
      return std::move(sc.domain);
    }
    if (a.domain.empty() || a.centers.empty())
      throw InvalidInput("check needs --scenario, or --domain with --centers");
    return io::load_domain_file(a.domain).domain;
  };
  const Domain domain = load();
  if (!s) throw InvalidInput("check needs --s");
  CoverOptions opts;
  opts.tolerance = a.tol;

  CoverageVerdict v;
  if (!a.centers.empty() && io::is_tree_document(io::detail::read_file(a.centers))) {
    const Tree tree = io::load_tree(io::detail::read_file(a.centers));
    kv(out, "input", "tree");
    kv(out, "points", std::to_string(tree.points.size()));
    kv(out, "edges", std::to_string(tree.edges.size()));
    kv(out, "s", io::format_number(*s));
    v = certify_cover(domain, tree, *s, opts);
  } else {
    if (!a.centers.empty()) centers = io::load_centers(io::detail::read_file(a.centers));
    if (centers.empty()) throw InvalidInput("no centers given");
    check_distinct(centers);
    kv(out, "input", "centers");
    kv(out, "points", std::to_string(centers.size()));
    kv(out, "s", io::format_number(*s));
    v = certify_cover(domain, std::span<const Point2>(centers), *s, opts);
  }
  detail::report_verdict(out, v);
  if (v.covered()) {
    kv(out, "summary", "covered: every point of the domain is within s of the input");
    return kSuccess;
  }
  if (v.status == CoverStatus::Uncovered) {
    kv(out, "summary", "not covered: the witness is " + detail::num(v.margin) + " beyond s");
  } else {
    kv(out, "summary", "undecided at this tolerance; treated as not covered");
  }
  return kUncovered;
}

inline int cmd_mst(const std::string& centers_file, std::ostream& out) {
  using detail::kv;
  const std::string text = io::detail::read_file(centers_file);
  const std::vector<Point2> pts =
      io::is_tree_document(text) ? io::load_tree(text).points : io::load_centers(text);
  const MSTResult mst = kruskal_mst(pts);
  kv(out, "points", std::to_string(pts.size()));
  kv(out, "length", detail::fixed6(mst.length));
  kv(out, "edges", std::to_string(mst.tree.edges.size()));
  for (auto [i, j] : mst.tree.edges) kv(out, "edge", std::to_string(i) + " " + std::to_string(j));
  kv(out, "summary", "minimum spanning tree of " + std::to_string(pts.size()) + " points has length " +
                         detail::fixed6(mst.length));
  return kSuccess;
}

struct ProngArgs {
  std::optional<double> segment;
  std::string polyline;
  double s = 0.0;
  std::optional<int> n;
  std::optional<double> beta;
  std::string out_dir;
};

inline int cmd_prongs(const ProngArgs& a, std::ostream& out) {
  using detail::kv;
  if (a.segment.has_value() == !a.polyline.empty())
    throw InvalidInput("prongs needs exactly one of --segment or --polyline");
  ProngCover cover;
  std::vector<Domain> target;
  if (a.segment) {
    if (!a.n) throw InvalidInput("--segment needs --n");
    const Segment seg{{0.0, 0.0}, {*a.segment, 0.0}};
    cover = segment_prong_cover(seg, a.s, *a.n);
    target.push_back(stadium_polygon(seg, a.s));
    kv(out, "curve", "segment");
  } else {
    if (!a.beta) throw InvalidInput("--polyline needs --beta");
    const Polyline poly = io::load_polyline(io::detail::read_file(a.polyline));
    cover = polyline_prong_cover(poly, a.s, *a.beta);
    target = buffer_pieces(poly, a.s);
    kv(out, "curve", "polyline");
    kv(out, "beta", io::format_number(*a.beta));
  }
  kv(out, "s", io::format_number(a.s));
  kv(out, "n", std::to_string(cover.n));
  kv(out, "delta", io::format_number(cover.delta));
  kv(out, "centers", std::to_string(cover.centers.points.size()));
  kv(out, "base_length", detail::fixed6(cover.base_length));
  kv(out, "connector_length", detail::fixed6(h1_length(cover.connector)));
  kv(out, "excess", detail::fixed6(cover.excess));

  const CoverageVerdict v = certify_cover_union(std::span<const Domain>(target),
                                                PointSetShape(cover.centers.points), a.s);
  kv(out, "status", to_string(v.status));
  kv(out, "margin", detail::num(v.margin));

  if (!a.out_dir.empty()) {
    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "centers.mdp.json", io::save_centers(cover.centers.points));
    detail::write_file(dir / "connector.mdp.json", io::save_tree(cover.connector));
    detail::write_file(dir / "prongs.svg", io::render_svg(std::span<const Domain>(target), cover));
    kv(out, "written", (dir / "centers.mdp.json").string());
    kv(out, "written", (dir / "connector.mdp.json").string());
    kv(out, "written", (dir / "prongs.svg").string());
  }
  if (!v.covered()) {
    kv(out, "summary", "self-certification failed: the construction does not cover its target");
    return kToleranceFailure;
  }
  kv(out, "summary", std::to_string(cover.centers.points.size()) + " centers cover the target; excess " +
                         detail::fixed6(cover.excess));
  return kSuccess;
}

struct OptimizeArgs {
  std::string domain;
  std::optional<double> s;
  OptimizerParams params;
  std::string out;
  std::string svg;
};

inline int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  using detail::kv;
  const std::string text = io::detail::read_file(a.domain);
  const json doc = io::detail::parse_json(text);
  const auto fmt = doc.find("format");
  io::Scenario sc = [&] {
    if (fmt != doc.end() && fmt->is_string() && fmt->get<std::string>() == "mdp-scenario")
      return io::load_scenario(text, std::filesystem::path(a.domain).parent_path());
    io::DomainDoc dd = io::load_domain_doc(text);
    return io::Scenario{dd.name, std::move(dd.domain), 0.0, {}, {}};
  }();
  if (a.s) sc.s = *a.s;
  if (!(sc.s > 0.0)) throw InvalidInput("optimize needs --s");

  ConfigState best;
  try {
    best = local_search(sc.domain, sc.s, a.params);
  } catch (const NoFeasibleStart& e) {
    kv(out, "status", "infeasible");
    kv(out, "summary", std::string("no feasible starting cover: ") + e.what());
    return kUncovered;
  }
  sc.centers = best.centers.points;
  sc.optimizer = a.params;
  kv(out, "s", io::format_number(sc.s));
  kv(out, "seed", std::to_string(a.params.seed));
  kv(out, "centers", std::to_string(best.centers.points.size()));
  kv(out, "objective", detail::fixed6(best.objective));
  detail::report_verdict(out, best.verdict);
  if (!a.out.empty()) {
    detail::write_file(a.out, io::save_scenario(sc));
    kv(out, "written", a.out);
  }
  if (!a.svg.empty()) {
    detail::write_file(a.svg, io::render_svg(sc.domain, best));
    kv(out, "written", a.svg);
  }
  if (!best.feasible()) {
    kv(out, "summary", "no certified cover found");
    return kUncovered;
  }
  kv(out, "summary", std::to_string(best.centers.points.size()) + " centers, MST length " +
                         detail::fixed6(best.objective));
  return kSuccess;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string domain;
  std::optional<double> s;
};

/// Serves until SIGINT or SIGTERM.
inline int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  using detail::kv;
  SessionStore store;
  std::optional<std::string> preloaded;
  if (!a.domain.empty()) {
    io::DomainDoc dd = io::load_domain_file(a.domain);
    preloaded = store.create(std::move(dd.domain), dd.name, a.s)->id;
  }
  // Block the stop signals before any server thread exists so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  HttpService service(store);
  if (!service.bind(a.host, a.port)) {
    err << "error: cannot bind " << a.host << ":" << a.port << " (port busy or not permitted)\n";
    return kInvalidInput;
  }
  kv(out, "listening", "http://" + a.host + ":" + std::to_string(service.port()));
  kv(out, "port", std::to_string(service.port()));
  if (preloaded) kv(out, "session", *preloaded);
  out.flush();
  service.start();
  int sig = 0;
  sigwait(&stop_signals, &sig);
  service.stop();
  kv(out, "summary", "stopped on signal " + std::to_string(sig));
  return kSuccess;
}

/// Parses argv and dispatches; errors are written to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Minimum-length connected covers of planar domains"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "certify that disks (or a tree neighbourhood) cover a domain");
  c->add_option("--scenario", check.scenario, "scenario file (domain, s and centers)");
  c->add_option("--domain", check.domain, "domain or scenario file");
  c->add_option("--centers", check.centers, "centers, scenario or tree file");
  c->add_option("--s", check.s, "radius (overrides the scenario)");
  c->add_option("--tol", check.tol, "certification tolerance; 0 selects 1e-6 x diameter")
      ->capture_default_str();

  std::string mst_centers;
  auto* m = app.add_subcommand("mst", "Euclidean minimum spanning tree of a point set");
  m->add_option("--centers", mst_centers, "centers, scenario or tree file")->required();

  ProngArgs prongs;
  auto* p = app.add_subcommand("prongs", "prong construction around a segment or polyline");
  p->add_option("--segment", prongs.segment, "segment length L, placed from (0, 0) to (L, 0)");
  p->add_option("--polyline", prongs.polyline, "mdp-polyline file");
  p->add_option("--s", prongs.s, "radius")->required();
  p->add_option("--n", prongs.n, "number of prong pairs (segment)");
  p->add_option("--beta", prongs.beta, "excess budget per unit length (polyline)");
  p->add_option("--out-dir", prongs.out_dir, "write centers, connector and SVG here");

  OptimizeArgs opt;
  auto* o = app.add_subcommand("optimize", "search for a short certified cover");
  o->add_option("--domain", opt.domain, "domain or scenario file")->required();
  o->add_option("--s", opt.s, "radius (overrides the scenario)");
  o->add_option("--n-max", opt.params.n_max, "maximum number of centers")->capture_default_str();
  o->add_option("--iters", opt.params.iterations, "iterations per restart")->capture_default_str();
  o->add_option("--seed", opt.params.seed, "random seed")->capture_default_str();
  o->add_option("--restarts", opt.params.restarts, "independent restarts")->capture_default_str();
  o->add_option("--step-scale", opt.params.step_scale, "perturbation scale, x s")->capture_default_str();
  o->add_option("--cooling", opt.params.cooling, "geometric cooling factor")->capture_default_str();
  o->add_option("--out", opt.out, "write the best scenario here");
  o->add_option("--svg", opt.svg, "write an SVG rendering here");

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "HTTP+JSON session service");
  sv->add_option("--host", serve.host, "listen address")->capture_default_str();
  sv->add_option("--port", serve.port, "listen port; 0 picks a free one")->capture_default_str();
  sv->add_option("--domain", serve.domain, "domain to open as the first session");
  sv->add_option("--s", serve.s, "radius for the preloaded session");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  try {
    if (c->parsed()) return cmd_check(check, out);
    if (m->parsed()) return cmd_mst(mst_centers, out);
    if (p->parsed()) return cmd_prongs(prongs, out);
    if (o->parsed()) return cmd_optimize(opt, out);
    if (sv->parsed()) return cmd_serve(serve, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ToleranceFailure& e) {
    err << "error: " << e.what() << "\n";
    return kToleranceFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kToleranceFailure;
  }
  return kInvalidInput;
}

}  // namespace mdp::cli
