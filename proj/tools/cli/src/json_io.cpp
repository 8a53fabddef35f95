#include "qsuff_cli/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace qsuff::cli {

namespace {

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }
std::string child(const std::string& pointer, std::size_t k) { return pointer + "/" + std::to_string(k); }

Complex pair_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(pointer, "expected an [re, im] pair of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Index index_from_json(const json& j, const std::string& pointer) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw ParseError(pointer, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

std::vector<Matrix> matrices_from_json(const json& j, const std::string& pointer, Index rows, Index cols) {
  if (!j.is_array()) throw ParseError(pointer, "expected a list of matrices");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_from_json(j[k], child(pointer, k), rows, cols));
  return out;
}

void require_hermitian(const Matrix& m, const std::string& pointer) {
  if (!is_hermitian(m)) throw ParseError(pointer, "matrix is not Hermitian");
}

ExpFamSpec expfam_from_json(const json& j, Index dim) {
  const std::string p = "/expfam";
  if (!j.is_object()) throw ParseError(p, "expected an object");
  ExpFamSpec e;
  if (j.contains("H")) {
    e.h = matrix_from_json(j["H"], child(p, "H"), dim, dim);
    require_hermitian(*e.h, child(p, "H"));
  }
  if (j.contains("reference")) {
    e.reference = matrix_from_json(j["reference"], child(p, "reference"), dim, dim);
    try {
      require_density(*e.reference, "reference");
    } catch (const DomainError& err) {
      throw ParseError(child(p, "reference"), err.what());
    }
  }
  if (e.h.has_value() == e.reference.has_value()) throw ParseError(p, "give exactly one of \"H\" and \"reference\"");
  if (!j.contains("generators")) throw ParseError(child(p, "generators"), "required");
  e.generators = matrices_from_json(j["generators"], child(p, "generators"), dim, dim);
  if (e.generators.empty()) throw ParseError(child(p, "generators"), "at least one generator is required");
  for (std::size_t k = 0; k < e.generators.size(); ++k) {
    require_hermitian(e.generators[k], child(child(p, "generators"), k));
  }
  if (j.contains("center")) {
    if (!j["center"].is_boolean()) throw ParseError(child(p, "center"), "expected a boolean");
    e.center = j["center"].get<bool>();
  }
  if (j.contains("theta")) {
    const json& t = j["theta"];
    const std::string tp = child(p, "theta");
    if (!t.is_array() || t.empty()) throw ParseError(tp, "expected a non-empty list");
    if (t[0].is_array()) {
      for (std::size_t k = 0; k < t.size(); ++k) e.theta.push_back(doubles_from_json(t[k], child(tp, k)));
    } else {
      e.theta.push_back(doubles_from_json(t, tp));
    }
    for (std::size_t k = 0; k < e.theta.size(); ++k) {
      if (e.theta[k].size() != e.generators.size()) {
        throw ParseError(child(tp, k), "needs one target per generator");
      }
    }
  }
  return e;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto colon = msg.find(": ", msg.find("]"));
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(path + ":" + std::to_string(line) + ":" + std::to_string(col), msg);
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& pointer, Index rows, Index cols) {
  if (!j.is_array() || j.empty()) throw ParseError(pointer, "expected a non-empty matrix");
  // Flat row-major list of pairs.
  if (j[0].is_array() && j[0].size() == 2 && j[0][0].is_number()) {
    const auto n = static_cast<Index>(j.size());
    Index r = rows, c = cols;
    if (r < 0 && c < 0) {
      r = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
      c = r;
    } else if (r < 0) {
      r = c > 0 ? n / c : 0;
    } else if (c < 0) {
      c = r > 0 ? n / r : 0;
    }
    if (r * c != n) {
      throw ParseError(pointer, "flat matrix has " + std::to_string(n) + " entries, expected " + std::to_string(r * c));
    }
    Matrix m(r, c);
    for (Index k = 0; k < n; ++k) m(k / c, k % c) = pair_from_json(j[static_cast<std::size_t>(k)], child(pointer, k));
    return m;
  }
  const auto r = static_cast<Index>(j.size());
  if (rows >= 0 && r != rows) {
    throw ParseError(pointer, "expected " + std::to_string(rows) + " rows, found " + std::to_string(r));
  }
  Index c = -1;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw ParseError(child(pointer, i), "expected a row of [re, im] pairs");
    const auto len = static_cast<Index>(j[i].size());
    if (c < 0) c = len;
    if (len != c) throw ParseError(child(pointer, i), "rows have different lengths");
  }
  if (cols >= 0 && c != cols) {
    throw ParseError(pointer, "expected " + std::to_string(cols) + " columns, found " + std::to_string(c));
  }
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index k = 0; k < c; ++k) {
      m(i, k) = pair_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                               child(child(pointer, static_cast<std::size_t>(i)), static_cast<std::size_t>(k)));
    }
  }
  return m;
}

std::vector<double> doubles_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw ParseError(pointer, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number_from_json(j[k], child(pointer, k)));
  return out;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double number_from_json(const json& j, const std::string& pointer) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError(pointer, "expected a number");
}

InputFile parse_input(const json& j) {
  if (!j.is_object()) throw ParseError("", "top level must be an object");
  if (!j.contains("format_version")) throw ParseError("/format_version", "required");
  if (j["format_version"] != kFormatVersion) {
    throw ParseError("/format_version", std::string("unsupported version, expected \"") + kFormatVersion + "\"");
  }
  InputFile in;
  if (!j.contains("dim")) throw ParseError("/dim", "required");
  in.dim = index_from_json(j["dim"], "/dim");

  if (j.contains("tensor_dims")) {
    const json& t = j["tensor_dims"];
    if (!t.is_array() || t.empty()) throw ParseError("/tensor_dims", "expected a non-empty list of positive integers");
    Index prod = 1;
    for (std::size_t k = 0; k < t.size(); ++k) {
      in.tensor_dims.push_back(index_from_json(t[k], child("/tensor_dims", k)));
      prod *= in.tensor_dims.back();
    }
    if (prod != in.dim) throw ParseError("/tensor_dims", "product " + std::to_string(prod) + " differs from dim " + std::to_string(in.dim));
  }

  if (j.contains("states")) {
    const json& s = j["states"];
    if (!s.is_array()) throw ParseError("/states", "expected a list");
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::string p = child("/states", k);
      if (!s[k].is_object()) throw ParseError(p, "expected {\"label\", \"matrix\"}");
      if (s[k].contains("label")) {
        if (!s[k]["label"].is_string()) throw ParseError(child(p, "label"), "expected a string");
        in.labels.push_back(s[k]["label"].get<std::string>());
      } else {
        in.labels.push_back("state" + std::to_string(k));
      }
      if (!s[k].contains("matrix")) throw ParseError(child(p, "matrix"), "required");
      const Matrix m = matrix_from_json(s[k]["matrix"], child(p, "matrix"), in.dim, in.dim);
      try {
        require_density(m, "state");
      } catch (const DomainError& e) {
        throw ParseError(child(p, "matrix"), e.what());
      }
      in.states.push_back(m);
    }
  }

  if (j.contains("weights")) {
    in.weights = doubles_from_json(j["weights"], "/weights");
    if (in.weights->size() != in.states.size()) throw ParseError("/weights", "needs one weight per state");
  }

  if (j.contains("channel")) {
    const json& c = j["channel"];
    if (!c.is_object()) throw ParseError("/channel", "expected an object");
    ChannelSpec ch;
    if (!c.contains("in_dim")) throw ParseError("/channel/in_dim", "required");
    ch.in_dim = index_from_json(c["in_dim"], "/channel/in_dim");
    ch.out_dim = c.contains("out_dim") ? index_from_json(c["out_dim"], "/channel/out_dim") : in.dim;
    if (ch.out_dim != in.dim) throw ParseError("/channel/out_dim", "must equal dim (states live on the output side)");
    if (!c.contains("kraus")) throw ParseError("/channel/kraus", "required");
    ch.kraus = matrices_from_json(c["kraus"], "/channel/kraus", ch.out_dim, ch.in_dim);
    if (ch.kraus.empty()) throw ParseError("/channel/kraus", "at least one Kraus operator is required");
    in.channel = std::move(ch);
  }

  if (j.contains("subalgebra_generators")) {
    in.subalgebra_generators = matrices_from_json(j["subalgebra_generators"], "/subalgebra_generators", in.dim, in.dim);
  }

  if (j.contains("expfam")) in.expfam = expfam_from_json(j["expfam"], in.dim);
  return in;
}

Experiment experiment_of(const InputFile& in) {
  if (in.states.empty()) throw ParseError("/states", "at least one state is required");
  try {
    return build_dominating_state(in.states, in.weights, in.labels);
  } catch (const DomainError& e) {
    throw ParseError(in.weights ? "/weights" : "/states", e.what());
  }
}

void write_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace qsuff::cli
