#pragma once

#include "conestab/constraint_system.hpp"
#include "conestab/stability.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conestab {

/// Malformed or inconsistent input; the message names the offending field.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path);

// Vectors cross the JSON boundary in dense form: symmetric blocks are
// row-major order×order arrays, the √2 scaling never appears.
int dense_dim(const Layout& layout);
Vec from_dense(const Layout& layout, const std::vector<double>& dense);
std::vector<double> to_dense(const Layout& layout, const Vec& v);

ConeDesc cone_from_json(const std::string& text);
std::string cone_to_json(const ConeDesc& k);

/// Named point of a problem file: x plus optional v, λ and a direction pair (d, w).
struct PointSpec {
  Vec x;
  std::optional<Vec> v;
  std::optional<Vec> lambda;
  std::optional<Vec> d;
  std::optional<Vec> w;
};

struct ProblemSpec {
  ConstraintSystem sys;
  std::optional<GEProblem> ge;
  std::map<std::string, PointSpec> points;
};

ProblemSpec problem_from_json(const std::string& text);
PointSpec point_from_json(const std::string& text, const ConstraintSystem& sys);

std::string certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const std::string& text);

struct ReportEntry {
  std::string name;
  Certificate cert;
  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct Report {
  std::string command;
  std::vector<ReportEntry> entries;
  std::vector<std::string> notes;
  friend bool operator==(const Report&, const Report&) = default;
};

std::string report_to_json(const Report& r);
Report report_from_json(const std::string& text);
std::string report_to_text(const Report& r);

}  // namespace conestab
