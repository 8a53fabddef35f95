#pragma once

// Experiment files and matrix encoding. Matrices are lists of rows, each row
// a list of [re, im] pairs; a flat row-major list of pairs is also accepted.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsuff/qsuff.hpp"

namespace qsuff::cli {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1";

/// Input problem located by a JSON pointer (or a line:column for syntax
/// errors).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)), detail_(what) {}
  const std::string& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

struct ChannelSpec {
  Index in_dim = 0;
  Index out_dim = 0;
  std::vector<Matrix> kraus;
};

struct ExpFamSpec {
  std::optional<Matrix> h;
  std::optional<Matrix> reference;
  std::vector<Matrix> generators;
  bool center = true;
  std::vector<std::vector<double>> theta;
};

struct InputFile {
  Index dim = 0;
  std::vector<Index> tensor_dims;
  std::vector<std::string> labels;
  std::vector<Matrix> states;
  std::optional<std::vector<double>> weights;
  std::optional<ChannelSpec> channel;
  std::optional<std::vector<Matrix>> subalgebra_generators;
  std::optional<ExpFamSpec> expfam;
};

/// Reads and parses a file; syntax errors carry "path:line:column".
json load_json_file(const std::string& path);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& pointer, Index rows = -1, Index cols = -1);
std::vector<double> doubles_from_json(const json& j, const std::string& pointer);

/// Finite numbers as numbers, otherwise "inf", "-inf" or "nan".
json number(double x);
double number_from_json(const json& j, const std::string& pointer);

InputFile parse_input(const json& j);

/// Experiment of the file's states (ParseError at /states when empty or
/// when a state is not a density matrix).
Experiment experiment_of(const InputFile& in);

/// Writes through a temporary file in the same directory and renames.
void write_atomically(const std::string& path, const std::string& contents);

}  // namespace qsuff::cli
