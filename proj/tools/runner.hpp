#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "slidekit/field.hpp"
#include "slidekit/integrand.hpp"
#include "slidekit/types.hpp"

namespace slidekit::runner {

// Malformed or out-of-range configuration; maps to exit status 2.
struct ConfigError : Error {
  using Error::Error;
};

// Flat key = value file with [section] headers. Inline '#' comments,
// quoted strings and bracketed lists are accepted and normalized.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& base_dir = ".");
  static Config load(const std::string& path);

  std::string experiment() const { return text("experiment"); }
  const std::string& base_dir() const { return base_dir_; }

  bool has(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;

  // Keys of one section, in file order.
  std::vector<std::pair<std::string, std::string>> section(const std::string& name) const;

 private:
  boost::property_tree::ptree tree_;
  std::string base_dir_;
};

using Metrics = std::vector<std::pair<std::string, double>>;

struct Outcome {
  std::string name;
  bool pass = false;
  Metrics metrics;
  std::vector<std::string> summary_keys;

  double metric(std::string_view key) const;
  std::string summary() const;
};

std::vector<std::string> experiment_names();
std::string describe(std::string_view name);

Grid make_grid(const Config& cfg);
ScalarField make_field(const Config& cfg, const Grid& grid);
Integrand make_integrand(const Config& cfg, int dim);

// Runs the configured experiment, writing <out>/<name>.csv (and any
// auxiliary files) into out_dir.
Outcome run_experiment(const Config& cfg, const std::string& out_dir);

// Assertion messages for every [assert] bound the outcome violates.
std::vector<std::string> check_assertions(const Config& cfg, const Outcome& outcome);

// Full run: 0 pass, 1 assertion failure, 2 malformed config.
int run(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err);

struct CriterionResult {
  int id = 0;
  bool pass = false;
  double seconds = 0.0;
  double limit = 0.0;  // runtime bound in seconds, 0 for none
  std::string detail;
};

// Acceptance criteria 1..10; each writes <out_dir>/criterion<N>.csv.
// Criterion 10 reruns 1..9 at 1 and 8 workers and compares the CSVs.
std::vector<CriterionResult> acceptance_suite(const std::string& out_dir, const std::vector<int>& which,
                                              std::ostream* log = nullptr);

std::string format_number(double v);  // CSV rendering, round-trip exact

}  // namespace slidekit::runner
