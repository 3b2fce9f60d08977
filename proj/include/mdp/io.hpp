#pragma once

// File formats and rendering.
//
//   mdp-domain    {"format", "version", "name", "boundary": [[x, y], ...], "holes": [ring, ...]}
//   mdp-scenario  {"format", "version", "name", "domain": <domain object> | "path",
//                  "s", "centers": [[x, y], ...], "optimizer": {...}}
//   mdp-centers   {"format", "version", "centers": [[x, y], ...]}
//   mdp-tree      {"format", "version", "points": [[x, y], ...], "edges": [[i, j], ...]}
//   mdp-polyline  {"format", "version", "points": [[x, y], ...]}
//
// Reading goes through nlohmann::json. Writing is a small canonical emitter:
// fixed key order, shortest round-trip numbers (std::to_chars), one point per
// line, so save(load(save(x))) == save(x) byte for byte.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mdp/constructive.hpp"
#include "mdp/coverage.hpp"
#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"
#include "mdp/optimizer.hpp"
#include "mdp/spanning.hpp"

namespace mdp::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct DomainDoc {
  std::string name;
  Domain domain;
};

struct Scenario {
  std::string name;
  Domain domain;
  double s = 0.0;
  std::vector<Point2> centers;
  std::optional<OptimizerParams> optimizer;
};

// ---------------------------------------------------------------------------
// Numbers

/// Shortest decimal that parses back to exactly `x`.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) throw InvalidInput("cannot serialize a non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw InvalidInput("not a number: '" + std::string(text) + "'");
  return x;
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

/// "line L, column C (byte B)" for a byte offset into `text`.
inline std::string describe_position(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + " (byte " +
         std::to_string(byte) + ")";
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token, 1-based.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    const auto cut = what.find("syntax error");
    if (cut != std::string::npos) what = what.substr(cut);
    throw ParseError("parse error at " + describe_position(text, byte) + ": " + what, byte);
  }
}

inline const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidInput(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInput(where + ": number is not finite");
  return x;
}

inline Point2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw InvalidInput(where + ": expected an [x, y] pair");
  return {number(v[0], where + "[0]"), number(v[1], where + "[1]")};
}

inline std::vector<Point2> points(const json& v, const std::string& where) {
  if (!v.is_array()) throw InvalidInput(where + ": expected an array of [x, y] pairs");
  std::vector<Point2> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(point(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline void check_header(const json& doc, std::string_view expected) {
  const json& f = member(doc, "format", "document");
  if (!f.is_string() || f.get<std::string>() != expected)
    throw InvalidInput("document: format must be \"" + std::string(expected) + "\"");
  const json& v = member(doc, "version", "document");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
    throw InvalidInput("document: unsupported version (expected " +
                       std::to_string(kFormatVersion) + ")");
}

inline std::string optional_name(const json& doc) {
  const auto it = doc.find("name");
  if (it == doc.end() || it->is_null()) return {};
  if (!it->is_string()) throw InvalidInput("name: expected a string");
  return it->get<std::string>();
}

inline DomainDoc domain_from_json(const json& doc, const std::string& where) {
  Ring boundary = points(member(doc, "boundary", where), where + ".boundary");
  std::vector<Ring> holes;
  if (const auto it = doc.find("holes"); it != doc.end()) {
    if (!it->is_array()) throw InvalidInput(where + ".holes: expected an array of rings");
    for (std::size_t h = 0; h < it->size(); ++h)
      holes.push_back(points((*it)[h], where + ".holes[" + std::to_string(h) + "]"));
  }
  return {optional_name(doc), Domain(std::move(boundary), std::move(holes))};
}

inline OptimizerParams optimizer_from_json(const json& o) {
  if (!o.is_object()) throw InvalidInput("optimizer: expected an object");
  OptimizerParams p;
  auto integer = [&](const char* key, auto& field) {
    if (const auto it = o.find(key); it != o.end()) {
      if (!it->is_number_integer()) throw InvalidInput(std::string("optimizer.") + key + ": expected an integer");
      field = it->get<std::decay_t<decltype(field)>>();
    }
  };
  auto real = [&](const char* key, double& field) {
    if (const auto it = o.find(key); it != o.end()) field = number(*it, std::string("optimizer.") + key);
  };
  integer("n_max", p.n_max);
  integer("iterations", p.iterations);
  integer("seed", p.seed);
  integer("restarts", p.restarts);
  real("step_scale", p.step_scale);
  real("cooling", p.cooling);
  real("coverage_tol", p.coverage_tol);
  p.validate();
  return p;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses an mdp-domain document (or the inline domain of an mdp-scenario).
inline DomainDoc load_domain_doc(std::string_view text) {
  const json doc = detail::parse_json(text);
  const json& f = detail::member(doc, "format", "document");
  if (f.is_string() && f.get<std::string>() == "mdp-scenario") {
    detail::check_header(doc, "mdp-scenario");
    const json& d = detail::member(doc, "domain", "document");
    if (!d.is_object()) throw InvalidInput("domain: a scenario with a domain reference has no inline domain");
    DomainDoc out = detail::domain_from_json(d, "domain");
    if (out.name.empty()) out.name = detail::optional_name(doc);
    return out;
  }
  detail::check_header(doc, "mdp-domain");
  return detail::domain_from_json(doc, "document");
}

inline Domain load_domain(std::string_view text) { return load_domain_doc(text).domain; }

/// Parses an mdp-scenario. A string "domain" field names a domain file,
/// resolved against `base_dir`.
inline Scenario load_scenario(std::string_view text, const std::filesystem::path& base_dir = {}) {
  const json doc = detail::parse_json(text);
  detail::check_header(doc, "mdp-scenario");
  const json& d = detail::member(doc, "domain", "document");
  std::optional<DomainDoc> domain;
  if (d.is_string()) {
    const std::filesystem::path ref = base_dir / d.get<std::string>();
    domain = load_domain_doc(detail::read_file(ref));
  } else {
    domain = detail::domain_from_json(d, "domain");
  }
  const double s = detail::number(detail::member(doc, "s", "document"), "s");
  if (!(s > 0.0)) throw InvalidInput("s: must be positive");
  std::vector<Point2> centers;
  if (const auto it = doc.find("centers"); it != doc.end()) centers = detail::points(*it, "centers");
  std::optional<OptimizerParams> opt;
  if (const auto it = doc.find("optimizer"); it != doc.end() && !it->is_null())
    opt = detail::optimizer_from_json(*it);
  std::string name = detail::optional_name(doc);
  if (name.empty()) name = domain->name;
  return Scenario{std::move(name), std::move(domain->domain), s, std::move(centers), opt};
}

/// Parses an mdp-tree document and validates it as a tree.
inline Tree load_tree(std::string_view text) {
  const json doc = detail::parse_json(text);
  detail::check_header(doc, "mdp-tree");
  Tree t;
  t.points = detail::points(detail::member(doc, "points", "document"), "points");
  const json& edges = detail::member(doc, "edges", "document");
  if (!edges.is_array()) throw InvalidInput("edges: expected an array of [i, j] pairs");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const json& e = edges[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      throw InvalidInput(where + ": expected a pair of vertex indices");
    t.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
  }
  validate_tree(t);
  return t;
}

/// Centers from an mdp-centers document ({"centers": [...]}) or from the
/// centers of an mdp-scenario; the domain is not read.
inline std::vector<Point2> load_centers(std::string_view text) {
  const json doc = detail::parse_json(text);
  const json& f = detail::member(doc, "format", "document");
  if (f.is_string() && f.get<std::string>() == "mdp-scenario") {
    detail::check_header(doc, "mdp-scenario");
  } else {
    detail::check_header(doc, "mdp-centers");
  }
  return detail::points(detail::member(doc, "centers", "document"), "centers");
}

/// Parses an mdp-polyline document.
inline Polyline load_polyline(std::string_view text) {
  const json doc = detail::parse_json(text);
  detail::check_header(doc, "mdp-polyline");
  return Polyline(detail::points(detail::member(doc, "points", "document"), "points"));
}

/// True when the text is an mdp-tree document (used to dispatch CLI input).
inline bool is_tree_document(std::string_view text) {
  const json doc = detail::parse_json(text);
  const auto it = doc.find("format");
  return it != doc.end() && it->is_string() && it->get<std::string>() == "mdp-tree";
}

inline DomainDoc load_domain_file(const std::filesystem::path& path) {
  return load_domain_doc(detail::read_file(path));
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  return load_scenario(detail::read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline std::string quoted(std::string_view s) { return json(std::string(s)).dump(); }

inline std::string pair_text(Point2 p) {
  return "[" + format_number(p.x) + ", " + format_number(p.y) + "]";
}

inline void write_points(std::ostringstream& out, const std::vector<Point2>& pts,
                         const std::string& indent) {
  if (pts.empty()) {
    out << "[]";
    return;
  }
  out << "[\n";
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << indent << "  " << pair_text(pts[i]) << (i + 1 < pts.size() ? ",\n" : "\n");
  out << indent << "]";
}

inline void write_domain_fields(std::ostringstream& out, const Domain& d, const std::string& indent) {
  out << indent << "\"boundary\": ";
  write_points(out, d.boundary(), indent);
  out << ",\n" << indent << "\"holes\": ";
  if (d.holes().empty()) {
    out << "[]";
  } else {
    out << "[\n";
    for (std::size_t h = 0; h < d.holes().size(); ++h) {
      out << indent << "  ";
      write_points(out, d.holes()[h], indent + "  ");
      out << (h + 1 < d.holes().size() ? ",\n" : "\n");
    }
    out << indent << "]";
  }
}

}  // namespace detail

inline std::string save_domain(const Domain& d, std::string_view name = {}) {
  std::ostringstream out;
  out << "{\n  \"format\": \"mdp-domain\",\n  \"version\": " << kFormatVersion << ",\n";
  if (!name.empty()) out << "  \"name\": " << detail::quoted(name) << ",\n";
  detail::write_domain_fields(out, d, "  ");
  out << "\n}\n";
  return out.str();
}

inline std::string save_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "{\n  \"format\": \"mdp-scenario\",\n  \"version\": " << kFormatVersion << ",\n";
  if (!sc.name.empty()) out << "  \"name\": " << detail::quoted(sc.name) << ",\n";
  out << "  \"s\": " << format_number(sc.s) << ",\n";
  out << "  \"domain\": {\n";
  detail::write_domain_fields(out, sc.domain, "    ");
  out << "\n  },\n  \"centers\": ";
  detail::write_points(out, sc.centers, "  ");
  if (sc.optimizer) {
    const OptimizerParams& p = *sc.optimizer;
    out << ",\n  \"optimizer\": {\n"
        << "    \"n_max\": " << p.n_max << ",\n"
        << "    \"iterations\": " << p.iterations << ",\n"
        << "    \"seed\": " << p.seed << ",\n"
        << "    \"restarts\": " << p.restarts << ",\n"
        << "    \"step_scale\": " << format_number(p.step_scale) << ",\n"
        << "    \"cooling\": " << format_number(p.cooling) << ",\n"
        << "    \"coverage_tol\": " << format_number(p.coverage_tol) << "\n  }";
  }
  out << "\n}\n";
  return out.str();
}

inline std::string save_centers(const std::vector<Point2>& centers) {
  std::ostringstream out;
  out << "{\n  \"format\": \"mdp-centers\",\n  \"version\": " << kFormatVersion
      << ",\n  \"centers\": ";
  detail::write_points(out, centers, "  ");
  out << "\n}\n";
  return out.str();
}

inline std::string save_tree(const Tree& t) {
  std::ostringstream out;
  out << "{\n  \"format\": \"mdp-tree\",\n  \"version\": " << kFormatVersion << ",\n  \"points\": ";
  detail::write_points(out, t.points, "  ");
  out << ",\n  \"edges\": [";
  for (std::size_t k = 0; k < t.edges.size(); ++k)
    out << (k ? ", " : "") << "[" << t.edges[k].first << ", " << t.edges[k].second << "]";
  out << "]\n}\n";
  return out.str();
}

inline std::string save_polyline(const Polyline& poly) {
  std::ostringstream out;
  out << "{\n  \"format\": \"mdp-polyline\",\n  \"version\": " << kFormatVersion
      << ",\n  \"points\": ";
  detail::write_points(out, poly.vertices(), "  ");
  out << "\n}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON views used by the service

inline json to_json(Point2 p) { return json::array({p.x, p.y}); }

inline json to_json(const std::vector<Point2>& pts) {
  json a = json::array();
  for (Point2 p : pts) a.push_back(to_json(p));
  return a;
}

inline json to_json(const CoverageVerdict& v) {
  json j{{"status", to_string(v.status)},
         {"margin", v.margin},
         {"tolerance", v.tolerance},
         {"cells", v.cells}};
  j["witness"] = v.witness ? to_json(*v.witness) : json(nullptr);
  return j;
}

inline json to_json(const MSTResult& m) {
  json edges = json::array();
  for (auto [a, b] : m.tree.edges) edges.push_back(json::array({a, b}));
  return json{{"length", m.length}, {"edges", edges}};
}

inline json domain_json(const Domain& d) {
  json holes = json::array();
  for (const Ring& h : d.holes()) holes.push_back(to_json(h));
  return json{{"boundary", to_json(d.boundary())}, {"holes", holes}};
}

// ---------------------------------------------------------------------------
// SVG

struct SvgScene {
  std::vector<Point2> centers;
  double radius = 0.0;             ///< disk radius; 0 draws no disks
  std::optional<Tree> mst;         ///< drawn as class="mst-edge"
  std::optional<Tree> connector;   ///< drawn as class="connector-edge"
  std::optional<Point2> witness;   ///< uncovered point, if any
};

struct SvgOptions {
  double width_px = 800.0;
  double margin = -1.0;  ///< world-units padding; negative selects the disk radius (or 5% of the diagonal)
};

/// Plain static SVG: domain pieces (holes cut out by even-odd fill),
/// translucent disks, MST edges, connector, witness marker, in that order.
/// The y axis points up in world coordinates.
inline std::string render_svg(std::span<const Domain> pieces, const SvgScene& scene,
                              const SvgOptions& opts = {}) {
  if (pieces.empty()) throw InvalidInput("render_svg: no domain pieces");
  Box box = pieces.front().bounding_box();
  for (const Domain& d : pieces) {
    box.expand({d.bounding_box().xmin, d.bounding_box().ymin});
    box.expand({d.bounding_box().xmax, d.bounding_box().ymax});
  }
  for (Point2 c : scene.centers) box.expand(c);
  const double diag = box.diagonal();
  double pad = opts.margin;
  if (pad < 0.0) pad = scene.radius > 0.0 ? scene.radius : 0.05 * diag;
  const double minx = box.xmin - pad;
  const double maxy = box.ymax + pad;
  const double w = box.width() + 2.0 * pad;
  const double h = box.height() + 2.0 * pad;
  const double height_px = opts.width_px * h / w;
  const double stroke = 0.003 * (diag + 2.0 * pad);
  auto num = [](double x) { return format_number(x); };
  auto X = [&](Point2 p) { return num(p.x); };
  auto Y = [&](Point2 p) { return num(-p.y); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(std::round(opts.width_px))
      << "\" height=\"" << num(std::round(height_px)) << "\" viewBox=\"" << num(minx) << " "
      << num(-maxy) << " " << num(w) << " " << num(h) << "\">\n";

  auto ring_path = [&](const Ring& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " L " : "M ") << X(r[i]) << " " << Y(r[i]);
    out << " Z";
  };
  for (const Domain& d : pieces) {
    out << "<path class=\"domain\" fill=\"#dde6f0\" stroke=\"#34495e\" stroke-width=\""
        << num(stroke) << "\" fill-rule=\"evenodd\" d=\"";
    ring_path(d.boundary());
    for (const Ring& hole : d.holes()) {
      out << " ";
      ring_path(hole);
    }
    out << "\"/>\n";
  }

  if (scene.radius > 0.0 && !scene.centers.empty()) {
    out << "<g class=\"disks\" fill=\"#e67e22\" fill-opacity=\"0.15\" stroke=\"#e67e22\" "
           "stroke-opacity=\"0.5\" stroke-width=\""
        << num(stroke / 2.0) << "\">\n";
    for (Point2 c : scene.centers)
      out << "<circle class=\"disk\" cx=\"" << X(c) << "\" cy=\"" << Y(c) << "\" r=\""
          << num(scene.radius) << "\"/>\n";
    out << "</g>\n";
  }
  auto edges = [&](const Tree& t, const char* group, const char* cls, const char* color, double sw) {
    out << "<g class=\"" << group << "\" stroke=\"" << color << "\" stroke-width=\"" << num(sw)
        << "\" stroke-linecap=\"round\">\n";
    for (auto [a, b] : t.edges) {
      out << "<line class=\"" << cls << "\" x1=\"" << X(t.points[a]) << "\" y1=\"" << Y(t.points[a])
          << "\" x2=\"" << X(t.points[b]) << "\" y2=\"" << Y(t.points[b]) << "\"/>\n";
    }
    out << "</g>\n";
  };
  if (scene.mst) edges(*scene.mst, "mst", "mst-edge", "#2c3e50", stroke);
  if (scene.connector) edges(*scene.connector, "connector", "connector-edge", "#27ae60", stroke);
  if (!scene.centers.empty()) {
    out << "<g class=\"centers\" fill=\"#2c3e50\">\n";
    for (Point2 c : scene.centers)
      out << "<circle class=\"center\" cx=\"" << X(c) << "\" cy=\"" << Y(c) << "\" r=\""
          << num(1.5 * stroke) << "\"/>\n";
    out << "</g>\n";
  }
  if (scene.witness) {
    out << "<circle class=\"witness\" cx=\"" << X(*scene.witness) << "\" cy=\"" << Y(*scene.witness)
        << "\" r=\"" << num(4.0 * stroke) << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\""
        << num(stroke) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline std::string render_svg(const Domain& d, const SvgScene& scene, const SvgOptions& opts = {}) {
  return render_svg(std::span<const Domain>(&d, 1), scene, opts);
}

inline std::string render_svg(const Domain& d, const ConfigState& state, const SvgOptions& opts = {}) {
  SvgScene scene;
  scene.centers = state.centers.points;
  scene.radius = state.centers.radius;
  if (!state.centers.points.empty()) scene.mst = state.mst.tree;
  scene.witness = state.verdict.witness;
  return render_svg(d, scene, opts);
}

inline std::string render_svg(const Domain& d, const ProngCover& cover, const SvgOptions& opts = {}) {
  SvgScene scene;
  scene.centers = cover.centers.points;
  scene.radius = cover.centers.radius;
  scene.connector = cover.connector;
  return render_svg(d, scene, opts);
}

/// Prong cover over a union of pieces (e.g. the buffer of a polyline).
inline std::string render_svg(std::span<const Domain> pieces, const ProngCover& cover,
                              const SvgOptions& opts = {}) {
  SvgScene scene;
  scene.centers = cover.centers.points;
  scene.radius = cover.centers.radius;
  scene.connector = cover.connector;
  return render_svg(pieces, scene, opts);
}

}  // namespace mdp::io
