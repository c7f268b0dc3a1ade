#include "conestab/json_io.hpp"

#include "conestab/detail/overloaded.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace conestab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw InputError("field '" + field + "': " + what);
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Report line and column instead of a byte offset.
    const std::size_t upto = std::min(e.byte, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": " + e.what());
  }
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

int need_int(const json& j, const std::string& key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number_integer() || v.get<long long>() <= 0) bad(path + "." + key, "expected a positive integer");
  return v.get<int>();
}

Sign parse_sign(const json& j, const std::string& path) {
  if (!j.contains("sign")) return Sign::plus;
  const json& s = j.at("sign");
  if (s == "plus") return Sign::plus;
  if (s == "minus") return Sign::minus;
  bad(path + ".sign", "expected \"plus\" or \"minus\"");
}

void flatten(const json& j, const std::string& path, std::vector<double>& out) {
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    bad(path, "expected a number or an array of numbers");
  }
}

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  flatten(j, path, out);
  for (const double d : out) {
    if (!std::isfinite(d)) bad(path, "non-finite entry");
  }
  return out;
}

Mat matrix(const json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) bad(path, "expected an array of rows");
  const std::vector<double> flat = numbers(j, path);
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    bad(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + " entries, got " +
                  std::to_string(flat.size()));
  }
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

PrimitiveCone parse_block(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) bad(path, "expected a single-key object naming the cone");
  const auto first = j.begin();
  const std::string key = first.key();
  const json& body = first.value();
  const std::string p = path + "." + key;
  if (key == "psd") return Semidefinite{need_int(body, "order", p), parse_sign(body, p)};
  if (key == "orthant") return Orthant{need_int(body, "dim", p), parse_sign(body, p)};
  if (key == "soc") return SecondOrder{need_int(body, "dim", p), parse_sign(body, p)};
  if (key == "zero") return ZeroCone{need_int(body, "dim", p)};
  if (key == "free") return FreeCone{need_int(body, "dim", p)};
  bad(path, "unknown cone '" + key + "'");
}

ConeDesc parse_cone(const json& j, const std::string& path) {
  const json& prod = need(j, "product", path);
  if (!prod.is_array() || prod.empty()) bad(path + ".product", "expected a non-empty array");
  std::vector<PrimitiveCone> blocks;
  for (std::size_t i = 0; i < prod.size(); ++i) {
    blocks.push_back(parse_block(prod[i], path + ".product[" + std::to_string(i) + "]"));
  }
  return ConeDesc(std::move(blocks));
}

json sign_json(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

json cone_json(const ConeDesc& k) {
  json prod = json::array();
  for (const auto& b : k.blocks()) {
    prod.push_back(std::visit(
        detail::overloaded{
            [](const Orthant& o) { return json{{"orthant", {{"dim", o.dim}, {"sign", sign_json(o.sign)}}}}; },
            [](const SecondOrder& s) {
              return json{{"soc", {{"dim", s.dim}, {"sign", sign_json(s.sign)}}}};
            },
            [](const Semidefinite& s) {
              return json{{"psd", {{"order", s.order}, {"sign", sign_json(s.sign)}}}};
            },
            [](const ZeroCone& z) { return json{{"zero", {{"dim", z.dim}}}}; },
            [](const FreeCone& f) { return json{{"free", {{"dim", f.dim}}}}; },
        },
        b));
  }
  return json{{"product", prod}};
}

/// Internal coordinates from dense ones (symmetric blocks are symmetrized).
Mat dense_to_internal(const Layout& layout) {
  Mat m = Mat::Zero(layout_dim(layout), dense_dim(layout));
  int ri = 0;
  int ci = 0;
  for (const auto& b : layout) {
    if (!b.symmetric) {
      m.block(ri, ci, b.size, b.size).setIdentity();
      ri += b.size;
      ci += b.size;
      continue;
    }
    const int n = b.size;
    for (int k = 0; k < n * n; ++k) {
      Vec e = Vec::Zero(n * n);
      e(k) = 1.0;
      const Mat a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          e.data(), n, n);
      m.block(ri, ci + k, svec_dim(n), 1) = svec(0.5 * (a + a.transpose()));
    }
    ri += svec_dim(n);
    ci += n * n;
  }
  return m;
}

/// Dense coordinates from internal ones.
Mat internal_to_dense(const Layout& layout) {
  Mat m = Mat::Zero(dense_dim(layout), layout_dim(layout));
  int ri = 0;
  int ci = 0;
  for (const auto& b : layout) {
    if (!b.symmetric) {
      m.block(ri, ci, b.size, b.size).setIdentity();
      ri += b.size;
      ci += b.size;
      continue;
    }
    const int n = b.size;
    for (int k = 0; k < svec_dim(n); ++k) {
      const Mat a = smat(Vec::Unit(svec_dim(n), k), n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) m(ri + r * n + c, ci + k) = a(r, c);
      }
    }
    ri += n * n;
    ci += svec_dim(n);
  }
  return m;
}

Vec parse_vec(const json& j, const std::string& path, const Layout& layout) {
  const std::vector<double> flat = numbers(j, path);
  if (static_cast<int>(flat.size()) != dense_dim(layout)) {
    bad(path, "expected " + std::to_string(dense_dim(layout)) + " entries, got " + std::to_string(flat.size()));
  }
  return from_dense(layout, flat);
}

Layout parse_domain(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of blocks");
  Layout out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (j[i].is_object() && j[i].contains("symmetric")) {
      out.push_back({true, need_int(j[i], "symmetric", p)});
    } else if (j[i].is_object() && j[i].contains("vector")) {
      out.push_back({false, need_int(j[i], "vector", p)});
    } else {
      bad(p, "expected {\"symmetric\": order} or {\"vector\": length}");
    }
  }
  return out;
}

ConstraintSystem builtin_system(const std::string& name, const std::string& path) {
  if (name == "example1" || name == "example2") return example1_system();
  if (name == "example3") return example3_system();
  if (name == "section32") return section32_system();
  bad(path, "unknown builtin '" + name + "' (expected example1, example2, example3 or section32)");
}

PointSpec parse_point(const json& j, const std::string& path, const ConstraintSystem& sys) {
  PointSpec p;
  const Layout range = layout_of(sys.cone);
  p.x = parse_vec(need(j, "x", path), path + ".x", sys.domain);
  const auto opt = [&](const char* key, const Layout& layout) -> std::optional<Vec> {
    if (!j.contains(key)) return std::nullopt;
    return parse_vec(j.at(key), path + "." + key, layout);
  };
  p.v = opt("v", sys.domain);
  p.lambda = opt("lambda", range);
  p.d = opt("d", sys.domain);
  p.w = opt("w", sys.domain);
  return p;
}

json real_json(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  return x;
}

double real_from(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (j == "Infinity") return std::numeric_limits<double>::infinity();
  if (j == "-Infinity") return -std::numeric_limits<double>::infinity();
  bad(path, "expected a number");
}

json cert_json(const Certificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["residual"] = real_json(c.residual);
  if (c.witness) {
    json w = json::array();
    for (Eigen::Index i = 0; i < c.witness->size(); ++i) w.push_back(real_json((*c.witness)(i)));
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  j["method"] = c.method;
  j["tol"] = {{"membership", c.tol.membership}, {"zero", c.tol.zero}, {"max_iter", c.tol.max_iter}};
  j["assumed"] = c.assumed;
  j["checked"] = c.checked;
  j["detail"] = c.detail;
  return j;
}

std::vector<std::string> strings(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) bad(path, "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

Certificate cert_from(const json& j, const std::string& path) {
  Certificate c;
  const json& v = need(j, "verdict", path);
  try {
    c.verdict = verdict_from_string(v.get<std::string>());
  } catch (const std::exception&) {
    bad(path + ".verdict", "expected holds, fails or inconclusive");
  }
  c.residual = real_from(need(j, "residual", path), path + ".residual");
  if (j.contains("witness") && !j.at("witness").is_null()) {
    const json& w = j.at("witness");
    if (!w.is_array()) bad(path + ".witness", "expected an array");
    Vec out(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = real_from(w[i], path + ".witness[" + std::to_string(i) + "]");
    }
    c.witness = out;
  }
  if (j.contains("method")) c.method = j.at("method").get<std::string>();
  if (j.contains("tol")) {
    const json& t = j.at("tol");
    c.tol.membership = real_from(need(t, "membership", path + ".tol"), path + ".tol.membership");
    c.tol.zero = real_from(need(t, "zero", path + ".tol"), path + ".tol.zero");
    c.tol.max_iter = need(t, "max_iter", path + ".tol").get<int>();
  }
  if (j.contains("assumed")) c.assumed = strings(j.at("assumed"), path + ".assumed");
  if (j.contains("checked")) c.checked = strings(j.at("checked"), path + ".checked");
  if (j.contains("detail")) c.detail = j.at("detail").get<std::string>();
  return c;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int dense_dim(const Layout& layout) {
  int n = 0;
  for (const auto& b : layout) n += b.symmetric ? b.size * b.size : b.size;
  return n;
}

Vec from_dense(const Layout& layout, const std::vector<double>& dense) {
  require_dim(static_cast<Eigen::Index>(dense.size()), dense_dim(layout), "dense vector");
  const Eigen::Map<const Vec> d(dense.data(), static_cast<Eigen::Index>(dense.size()));
  return dense_to_internal(layout) * d;
}

std::vector<double> to_dense(const Layout& layout, const Vec& v) {
  require_dim(v.size(), layout_dim(layout), "vector");
  const Vec d = internal_to_dense(layout) * v;
  return {d.data(), d.data() + d.size()};
}

ConeDesc cone_from_json(const std::string& text) {
  try {
    return parse_cone(parse_text(text), "cone");
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const InputError*>(&e) != nullptr) throw;
    throw InputError(std::string("cone: ") + e.what());
  }
}

std::string cone_to_json(const ConeDesc& k) { return cone_json(k).dump(); }

ProblemSpec problem_from_json(const std::string& text) {
  const json j = parse_text(text);
  ProblemSpec spec;
  try {
    const json& mapping = need(j, "mapping", "problem");
    std::optional<ConeDesc> cone;
    if (j.contains("cone")) cone = parse_cone(j.at("cone"), "problem.cone");
    if (mapping.contains("builtin")) {
      spec.sys = builtin_system(mapping.at("builtin").get<std::string>(), "problem.mapping.builtin");
      if (cone && !(*cone == spec.sys.cone)) {
        bad("problem.cone", "does not match the builtin cone " + spec.sys.cone.describe());
      }
    } else {
      if (!cone) bad("problem.cone", "required for non-builtin mappings");
      const Layout range = layout_of(*cone);
      const Mat to_int = dense_to_internal(range);
      const std::string kind = mapping.contains("affine") ? "affine" : mapping.contains("quadratic") ? "quadratic" : "";
      if (kind.empty()) bad("problem.mapping", "expected builtin, affine or quadratic");
      const json& body = mapping.at(kind);
      const std::string p = "problem.mapping." + kind;
      const json& a_json = need(body, "A", p);
      if (!a_json.is_array() || a_json.empty() || !a_json[0].is_array()) bad(p + ".A", "expected an array of rows");
      const auto cols = static_cast<Eigen::Index>(a_json[0].size());
      Layout domain{{false, static_cast<int>(cols)}};
      if (j.contains("domain")) domain = parse_domain(j.at("domain"), "problem.domain");
      if (dense_dim(domain) != cols) bad("problem.domain", "does not match the column count of A");
      const Mat dom_dense = internal_to_dense(domain);
      const Mat a = to_int * matrix(a_json, p + ".A", dense_dim(range), cols) * dom_dense;
      const std::vector<double> bflat = numbers(need(body, "b", p), p + ".b");
      if (static_cast<int>(bflat.size()) != dense_dim(range)) bad(p + ".b", "wrong length");
      const Vec b = to_int * Eigen::Map<const Vec>(bflat.data(), static_cast<Eigen::Index>(bflat.size()));
      if (kind == "affine") {
        spec.sys = affine_system(*cone, a, b);
      } else {
        const json& ql = need(body, "Q_list", p);
        if (!ql.is_array() || static_cast<int>(ql.size()) != dense_dim(range)) {
          bad(p + ".Q_list", "expected one matrix per dense range coordinate");
        }
        std::vector<Mat> dense_q;
        for (std::size_t i = 0; i < ql.size(); ++i) {
          dense_q.push_back(matrix(ql[i], p + ".Q_list[" + std::to_string(i) + "]", cols, cols));
        }
        std::vector<Mat> qs;
        for (Eigen::Index k = 0; k < to_int.rows(); ++k) {
          Mat q = Mat::Zero(cols, cols);
          for (Eigen::Index i = 0; i < to_int.cols(); ++i) q += to_int(k, i) * dense_q[static_cast<std::size_t>(i)];
          qs.push_back(dom_dense.transpose() * q * dom_dense);
        }
        spec.sys = quadratic_system(*cone, qs, a, b);
      }
      spec.sys.domain = domain;
    }
    if (j.contains("F")) {
      const json& f = j.at("F");
      GEProblem ge;
      ge.sys = spec.sys;
      if (f.contains("builtin")) {
        if (f.at("builtin") != "example41") bad("problem.F.builtin", "unknown builtin (expected example41)");
        ge = example41_problem();
        if (!(ge.sys.cone == spec.sys.cone)) bad("problem.F", "example41 requires the example1 mapping");
      } else if (f.contains("affine_in_x")) {
        const json& body = f.at("affine_in_x");
        const std::string p = "problem.F.affine_in_x";
        const int n = dense_dim(spec.sys.domain);
        const Mat to_int = dense_to_internal(spec.sys.domain);
        const Mat dom_dense = internal_to_dense(spec.sys.domain);
        const Mat b = to_int * matrix(need(body, "B", p), p + ".B", n, n) * dom_dense;
        const std::vector<double> cflat = numbers(need(body, "c", p), p + ".c");
        if (static_cast<int>(cflat.size()) != n) bad(p + ".c", "wrong length");
        const Vec c = to_int * Eigen::Map<const Vec>(cflat.data(), n);
        const std::vector<double> pb = j.contains("pbar") ? numbers(j.at("pbar"), "problem.pbar")
                                                          : std::vector<double>{};
        const auto pn = static_cast<Eigen::Index>(pb.size());
        Mat ap = Mat::Zero(n, pn);
        if (body.contains("A_p")) ap = matrix(body.at("A_p"), p + ".A_p", n, pn);
        ge.f = affine_param_map(to_int * ap, b, c);
        ge.pbar = Eigen::Map<const Vec>(pb.data(), pn);
      } else {
        bad("problem.F", "expected builtin or affine_in_x");
      }
      if (j.contains("xbar")) ge.xbar = parse_vec(j.at("xbar"), "problem.xbar", ge.sys.domain);
      if (ge.xbar.size() != ge.sys.domain_dim()) bad("problem.xbar", "missing or wrong length");
      spec.ge = ge;
    }
    if (j.contains("points")) {
      const json& pts = j.at("points");
      if (!pts.is_object()) bad("problem.points", "expected an object of named points");
      for (const auto& [name, body] : pts.items()) {
        spec.points.emplace(name, parse_point(body, "problem.points." + name, spec.sys));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("problem: ") + e.what());
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("problem: ") + e.what());
  }
  return spec;
}

PointSpec point_from_json(const std::string& text, const ConstraintSystem& sys) {
  try {
    return parse_point(parse_text(text), "point", sys);
  } catch (const json::exception& e) {
    throw InputError(std::string("point: ") + e.what());
  }
}

std::string certificate_to_json(const Certificate& c) { return cert_json(c).dump(2); }

Certificate certificate_from_json(const std::string& text) {
  try {
    return cert_from(parse_text(text), "certificate");
  } catch (const json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

std::string report_to_json(const Report& r) {
  json j;
  j["command"] = r.command;
  json arr = json::array();
  for (const auto& e : r.entries) {
    json c = cert_json(e.cert);
    c["name"] = e.name;
    arr.push_back(c);
  }
  j["certificates"] = arr;
  j["notes"] = r.notes;
  return j.dump(2);
}

Report report_from_json(const std::string& text) {
  try {
    const json j = parse_text(text);
    Report r;
    r.command = need(j, "command", "report").get<std::string>();
    const json& arr = need(j, "certificates", "report");
    if (!arr.is_array()) bad("report.certificates", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "report.certificates[" + std::to_string(i) + "]";
      r.entries.push_back({need(arr[i], "name", p).get<std::string>(), cert_from(arr[i], p)});
    }
    if (j.contains("notes")) r.notes = strings(j.at("notes"), "report.notes");
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
}

std::string report_to_text(const Report& r) {
  std::ostringstream os;
  os << r.command << "\n";
  std::size_t width = 0;
  for (const auto& e : r.entries) width = std::max(width, e.name.size());
  for (const auto& e : r.entries) {
    os << "  " << e.name << std::string(width - e.name.size(), ' ') << " : " << to_string(e.cert.verdict)
       << "  (residual " << e.cert.residual << ")\n";
    if (!e.cert.method.empty()) os << "      method : " << e.cert.method << "\n";
    for (const auto& a : e.cert.assumed) os << "      assumed: " << a << "\n";
    for (const auto& c : e.cert.checked) os << "      checked: " << c << "\n";
    if (!e.cert.detail.empty()) os << "      detail : " << e.cert.detail << "\n";
    if (e.cert.witness) {
      os << "      witness: [";
      for (Eigen::Index i = 0; i < e.cert.witness->size(); ++i) os << (i ? ", " : "") << (*e.cert.witness)(i);
      os << "]\n";
    }
  }
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  return os.str();
}

}  // namespace conestab
