#include <algorithm>
#include <cmath>
#include <sstream>

#include "qsuff_cli/cli.hpp"

namespace qsuff::cli {

namespace {

int exit_code_of(Verdict v) {
  switch (v) {
    case Verdict::kSufficient:
      return kExitSufficient;
    case Verdict::kInsufficient:
      return kExitInsufficient;
    case Verdict::kBorderline:
      return kExitBorderline;
  }
  return kExitBorderline;
}

json verdict_json(const SufficiencyVerdict& v) {
  json conditions = json::array();
  for (const ConditionResult& c : v.conditions) {
    conditions.push_back({{"label", c.label},
                          {"residual", number(c.residual)},
                          {"verdict", c.evaluated ? to_string(c.verdict) : "not_evaluated"},
                          {"evaluated", c.evaluated}});
  }
  return {{"verdict", to_string(v.verdict)},
          {"conditions", conditions},
          {"trivial", v.trivial},
          {"compressed", v.compressed},
          {"warnings", v.warnings}};
}

json matrices_json(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const Matrix& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

SufficiencyOptions sufficiency_options(const Settings& s) {
  SufficiencyOptions o;
  o.tol = s.tol;
  o.t_grid = s.t_grid;
  o.seed = s.seed;
  return o;
}

Channel channel_of(const InputFile& in) {
  if (!in.channel) throw ParseError("/channel", "required");
  return Channel(in.channel->kraus);
}

MatrixStarAlgebra subalgebra_of(const InputFile& in) {
  if (!in.subalgebra_generators) throw ParseError("/subalgebra_generators", "required");
  return generate_algebra(*in.subalgebra_generators, in.dim);
}

bool is_commutative(const MatrixStarAlgebra& a) {
  const std::vector<Matrix> el = a.elements();
  for (std::size_t i = 0; i < el.size(); ++i) {
    for (std::size_t k = i + 1; k < el.size(); ++k) {
      if ((el[i] * el[k] - el[k] * el[i]).norm() > 1e-10) return false;
    }
  }
  return true;
}

ExponentialFamily family_of(const InputFile& in) {
  if (!in.expfam) throw ParseError("/expfam", "required");
  const ExpFamSpec& e = *in.expfam;
  try {
    if (e.h) return ExponentialFamily(*e.h, e.generators);
    return ExponentialFamily::around(*e.reference, e.generators, e.center);
  } catch (const DomainError& err) {
    throw ParseError("/expfam/generators", err.what());
  }
}

// ---------------------------------------------------------------------------
// Commands

Outcome check_subalgebra(const InputFile& in, const Settings& s) {
  const Experiment exp = experiment_of(in);
  const MatrixStarAlgebra a = subalgebra_of(in);
  const SufficiencyVerdict v = subalgebra_sufficiency(exp, a, sufficiency_options(s));
  json result = verdict_json(v);
  result["algebra_dimension"] = a.dimension();
  return {exit_code_of(v.verdict), {{"result", result}}};
}

Outcome check_channel(const InputFile& in, const Settings& s) {
  const Experiment exp = experiment_of(in);
  const SufficiencyVerdict v = channel_sufficiency(exp, channel_of(in), sufficiency_options(s));
  return {exit_code_of(v.verdict), {{"result", verdict_json(v)}}};
}

json structure_json(const BlockStructure& bs) {
  json blocks = json::array();
  for (const Block& b : bs.blocks) blocks.push_back({{"d", b.d}, {"m", b.m}, {"offset", b.offset}});
  return {{"unitary", matrix_to_json(bs.unitary)}, {"blocks", blocks}};
}

Outcome decompose(const InputFile& in, const Settings& s) {
  const Experiment exp = experiment_of(in);
  const SDecomposition d = s_decomposition(exp, sufficiency_options(s));
  json blocks = json::array();
  for (std::size_t n = 0; n < d.blocks.size(); ++n) {
    const SBlock& b = d.blocks[n];
    json weights = json::array();
    for (double w : b.weights) weights.push_back(number(w));
    blocks.push_back({{"d", b.d},
                      {"m", b.m},
                      {"offset", d.structure.blocks[n].offset},
                      {"weights", weights},
                      {"left", matrices_json(b.left)},
                      {"right", matrix_to_json(b.right)},
                      {"central", number(b.central)}});
  }
  json result = {{"algebra_dimension", d.algebra.dimension()},
                 {"unitary", matrix_to_json(d.structure.unitary)},
                 {"blocks", blocks},
                 {"reconstruction_residual", number(d.reconstruction_residual)},
                 {"weight_residual", number(d.weight_residual)},
                 {"right_factor_spread", number(d.right_factor_spread)},
                 {"reconstruction_tol", 1e-8},
                 {"weight_tol", 1e-8}};
  return {kExitSufficient, {{"result", result}}};
}

TripartiteDims tripartite_of(const InputFile& in) {
  if (in.tensor_dims.size() != 3) throw ParseError("/tensor_dims", "ssa needs exactly three subsystem dimensions");
  if (in.states.size() != 1) throw ParseError("/states", "ssa needs exactly one state");
  return {in.tensor_dims[0], in.tensor_dims[1], in.tensor_dims[2]};
}

Outcome ssa(const InputFile& in, const Settings& s) {
  const TripartiteDims dims = tripartite_of(in);
  const Matrix& rho = in.states.front();
  const SsaGap g = ssa_gap(rho, dims);
  json result = {{"gap",
                  {{"entropy_form", number(g.entropy_form)},
                   {"relative_entropy_form", number(g.relative_entropy_form)},
                   {"discrepancy", number(g.discrepancy)}}},
                 {"equality_tol", s.tol},
                 {"reconstruction_tol", s.tol},
                 {"equality", false},
                 {"structure", nullptr}};
  if (!(g.entropy_form <= s.tol)) return {kExitInsufficient, {{"result", result}}};

  SsaOptions o;
  o.t_grid = s.t_grid;
  o.seed = s.seed;
  o.equality_tol = s.tol;
  o.reconstruction_tol = s.tol;
  SsaStructure st;
  try {
    st = ssa_equality_structure(rho, dims, o);
  } catch (const InsufficientError& e) {
    result["note"] = e.what();
    return {kExitInsufficient, {{"result", result}}};
  }
  json components = json::array();
  for (const SsaComponent& c : st.components) {
    components.push_back({{"weight", number(c.weight)},
                          {"d_left", c.d_left},
                          {"d_right", c.d_right},
                          {"left", matrix_to_json(c.left)},
                          {"right", matrix_to_json(c.right)}});
  }
  json structure = structure_json(st.b_structure);
  structure["components"] = components;
  structure["reconstruction_residual"] = number(st.reconstruction_residual);
  structure["weight_residual"] = number(st.weight_residual);
  structure["pure_state_path"] = st.pure_state_path;
  structure["cross_check"] = st.cross_check ? verdict_json(*st.cross_check) : json(nullptr);
  result["equality"] = true;
  result["structure"] = structure;
  return {kExitSufficient, {{"result", result}}};
}

Outcome expfam_fit(const InputFile& in, const Settings&) {
  const ExponentialFamily fam = family_of(in);
  if (in.expfam->theta.empty()) throw ParseError("/expfam/theta", "required for fit");
  json fits = json::array();
  for (std::size_t k = 0; k < in.expfam->theta.size(); ++k) {
    const std::vector<double>& theta = in.expfam->theta[k];
    try {
      const MomentMatch m = moment_match(fam, theta);
      fits.push_back({{"theta", theta}, {"xi", m.xi}, {"residual", number(m.residual)}, {"iterations", m.iterations}});
    } catch (const RegionExitError& e) {
      json error = {{"kind", "region_exit"},
                    {"message", e.what()},
                    {"pointer", "/expfam/theta/" + std::to_string(k)},
                    {"theta", theta},
                    {"last_iterate", e.last_iterate()},
                    {"residual", number(e.residual())}};
      return {kExitRegionExit, {{"result", {{"fits", fits}}}, {"error", error}}};
    }
  }
  return {kExitSufficient, {{"result", {{"fits", fits}}}}};
}

Outcome expfam_check(const InputFile& in, const Settings& s) {
  const ExponentialFamily fam = family_of(in);
  if (!in.subalgebra_generators && !in.channel) {
    throw ParseError("/subalgebra_generators", "give subalgebra_generators or a channel to check");
  }
  const SufficiencyOptions o = sufficiency_options(s);
  json result = json::object();
  std::vector<Verdict> verdicts;
  if (in.subalgebra_generators) {
    const MatrixStarAlgebra a = subalgebra_of(in);
    const ExpFamSubalgebraVerdict v = expfam_subalgebra_sufficiency(fam, a, o);
    result["subalgebra"] = {{"verdict", to_string(v.verdict)},
                            {"flow_residual", number(v.flow_residual)},
                            {"expectation_residual", number(v.expectation_residual)},
                            {"generic", verdict_json(v.generic)},
                            {"agree", v.agree}};
    verdicts.push_back(v.verdict);
    if (is_commutative(a)) {
      const CommutativeFamilyVerdict c = commutative_family_check(fam, a, o);
      result["commutative"] = {{"verdict", to_string(c.verdict)},
                               {"membership_residual", number(c.membership_residual)},
                               {"closed_form_residual", number(c.closed_form_residual)},
                               {"generic", verdict_json(c.generic)},
                               {"agree", c.agree}};
      verdicts.push_back(c.verdict);
    }
  }
  if (in.channel) {
    const ExpFamChannelVerdict v = expfam_channel_sufficiency(fam, channel_of(in), o);
    result["channel"] = {{"verdict", to_string(v.verdict)},
                         {"preimage_residual", number(v.preimage_residual)},
                         {"family_residual", number(v.family_residual)},
                         {"generic", verdict_json(v.generic)},
                         {"agree", v.agree}};
    verdicts.push_back(v.verdict);
  }
  int code = kExitSufficient;
  for (Verdict v : verdicts) code = std::max(code, exit_code_of(v));
  return {code, {{"result", result}}};
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  double residual;
  double tolerance;
};

Matrix matrix_at(const json& j, const std::string& pointer) { return matrix_from_json(j, pointer); }

void check_isometry(const Matrix& u, std::vector<Check>& checks) {
  checks.push_back({"unitary_orthonormal", (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm(), 1e-8});
}

std::vector<Check> verify_decompose(const InputFile& in, const json& r) {
  const std::string p = "/result";
  SDecomposition d;
  d.structure.unitary = matrix_at(r.at("unitary"), p + "/unitary");
  const json& blocks = r.at("blocks");
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const std::string bp = p + "/blocks/" + std::to_string(n);
    const json& b = blocks[n];
    Block blk;
    blk.d = b.at("d").get<Index>();
    blk.m = b.at("m").get<Index>();
    blk.offset = b.at("offset").get<Index>();
    if (blk.offset < 0 || blk.offset + blk.d * blk.m > d.structure.unitary.cols()) {
      throw ParseError(bp, "block does not fit in the unitary");
    }
    d.structure.blocks.push_back(blk);
    SBlock sb;
    sb.d = blk.d;
    sb.m = blk.m;
    sb.weights = doubles_from_json(b.at("weights"), bp + "/weights");
    for (std::size_t k = 0; k < b.at("left").size(); ++k) {
      sb.left.push_back(matrix_from_json(b["left"][k], bp + "/left/" + std::to_string(k), blk.d, blk.d));
    }
    sb.right = matrix_from_json(b.at("right"), bp + "/right", blk.m, blk.m);
    if (sb.weights.size() != in.states.size() || sb.left.size() != in.states.size()) {
      throw ParseError(bp, "needs one weight and one left factor per state");
    }
    d.blocks.push_back(std::move(sb));
  }
  std::vector<Check> checks;
  check_isometry(d.structure.unitary, checks);
  double recon = 0.0, weights = 0.0;
  for (std::size_t k = 0; k < in.states.size(); ++k) {
    recon = std::max(recon, (reconstruct_state(d, k) - in.states[k]).norm());
    for (std::size_t n = 0; n < d.blocks.size(); ++n) {
      const Matrix w = d.structure.isometry(n);
      const double phi = (in.states[k] * w * w.adjoint()).trace().real();
      weights = std::max(weights, std::abs(phi - d.blocks[n].weights[k]));
    }
  }
  checks.push_back({"reconstruction", recon, r.at("reconstruction_tol").get<double>()});
  checks.push_back({"weights", weights, r.at("weight_tol").get<double>()});
  return checks;
}

std::vector<Check> verify_ssa(const InputFile& in, const json& r) {
  std::vector<Check> checks;
  if (!r.at("equality").get<bool>()) return checks;
  const TripartiteDims dims = tripartite_of(in);
  const std::string p = "/result/structure";
  const json& js = r.at("structure");
  SsaStructure st;
  st.b_structure.unitary = matrix_at(js.at("unitary"), p + "/unitary");
  for (const json& b : js.at("blocks")) {
    st.b_structure.blocks.push_back({b.at("d").get<Index>(), b.at("m").get<Index>(), b.at("offset").get<Index>()});
  }
  const json& comps = js.at("components");
  if (comps.size() != st.b_structure.blocks.size()) throw ParseError(p + "/components", "needs one component per block");
  double total = 0.0;
  for (std::size_t n = 0; n < comps.size(); ++n) {
    const std::string cp = p + "/components/" + std::to_string(n);
    SsaComponent c;
    c.weight = number_from_json(comps[n].at("weight"), cp + "/weight");
    c.d_left = comps[n].at("d_left").get<Index>();
    c.d_right = comps[n].at("d_right").get<Index>();
    c.left = matrix_from_json(comps[n].at("left"), cp + "/left", dims[0] * c.d_left, dims[0] * c.d_left);
    c.right = matrix_from_json(comps[n].at("right"), cp + "/right", c.d_right * dims[2], c.d_right * dims[2]);
    total += c.weight;
    st.components.push_back(std::move(c));
  }
  checks.push_back({"b_isometry_orthonormal",
                    (st.b_structure.unitary.adjoint() * st.b_structure.unitary -
                     Matrix::Identity(st.b_structure.unitary.cols(), st.b_structure.unitary.cols()))
                        .norm(),
                    1e-8});
  checks.push_back({"weights_sum", std::abs(total - 1.0), 1e-8});
  checks.push_back({"reconstruction", (reconstruct_ssa_state(st, dims) - in.states.front()).norm(),
                    r.at("reconstruction_tol").get<double>()});
  return checks;
}

const std::vector<std::string>& verifiable() {
  static const std::vector<std::string> names{"check-subalgebra", "check-channel", "decompose",
                                              "ssa",              "expfam-fit",    "expfam-check"};
  return names;
}

Outcome verify(const json& report) {
  if (!report.is_object()) throw ParseError("", "expected a report object");
  if (!report.contains("command") || !report["command"].is_string()) throw ParseError("/command", "required");
  const std::string command = report["command"].get<std::string>();
  if (std::find(verifiable().begin(), verifiable().end(), command) == verifiable().end()) {
    throw ParseError("/command", "cannot verify a \"" + command + "\" report");
  }
  if (report.contains("error")) throw ParseError("/error", "report records an error; nothing to verify");
  for (const char* key : {"input", "settings", "result"}) {
    if (!report.contains(key)) throw ParseError(std::string("/") + key, "required");
  }
  const Settings settings = settings_from_json(report["settings"], "/settings");
  const InputFile in = parse_input(report["input"]);

  std::vector<Check> checks;
  try {
    if (command == "decompose") checks = verify_decompose(in, report["result"]);
    if (command == "ssa") checks = verify_ssa(in, report["result"]);
  } catch (const json::exception& e) {
    throw ParseError("/result", e.what());
  }

  const Outcome again = execute(command, report["input"], settings);
  const bool same = again.report.contains("result") && again.report["result"] == report["result"] &&
                    again.exit_code == report.value("exit_code", -1);

  bool ok = same;
  json list = json::array();
  for (const Check& c : checks) {
    const bool pass = c.residual <= c.tolerance;
    ok = ok && pass;
    list.push_back({{"name", c.name}, {"residual", number(c.residual)}, {"tolerance", c.tolerance}, {"ok", pass}});
  }
  json result = {{"verified_command", command}, {"rerun_matches", same}, {"checks", list}, {"ok", ok}};
  return {ok ? kExitSufficient : kExitInsufficient, {{"result", result}}};
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"kind", kind}, {"message", message}};
}

}  // namespace

json settings_to_json(const Settings& s) { return {{"tol", s.tol}, {"t_grid", s.t_grid}, {"seed", s.seed}}; }

Settings settings_from_json(const json& j, const std::string& pointer) {
  if (!j.is_object()) throw ParseError(pointer, "expected an object");
  Settings s;
  if (!j.contains("tol") || !j["tol"].is_number()) throw ParseError(pointer + "/tol", "expected a number");
  s.tol = j["tol"].get<double>();
  if (!j.contains("t_grid")) throw ParseError(pointer + "/t_grid", "required");
  s.t_grid = doubles_from_json(j["t_grid"], pointer + "/t_grid");
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) throw ParseError(pointer + "/seed", "expected an unsigned integer");
  s.seed = j["seed"].get<std::uint64_t>();
  return s;
}

Outcome execute(const std::string& command, const json& input, const Settings& settings) {
  json head = {{"format_version", kFormatVersion}, {"command", command}};
  if (command != "verify") head["input"] = input;
  head["settings"] = settings_to_json(settings);

  Outcome out;
  try {
    if (command == "verify") {
      out = verify(input);
    } else {
      const InputFile in = parse_input(input);
      if (command == "check-subalgebra") {
        out = check_subalgebra(in, settings);
      } else if (command == "check-channel") {
        out = check_channel(in, settings);
      } else if (command == "decompose") {
        out = decompose(in, settings);
      } else if (command == "ssa") {
        out = ssa(in, settings);
      } else if (command == "expfam-fit") {
        out = expfam_fit(in, settings);
      } else if (command == "expfam-check") {
        out = expfam_check(in, settings);
      } else {
        throw ParseError("", "unknown command " + command);
      }
    }
  } catch (const ParseError& e) {
    out.exit_code = kExitParse;
    out.report = {{"error", {{"kind", "parse"}, {"message", e.detail()}, {"pointer", e.where()}}}};
  } catch (const NonStabilizingError& e) {
    out.exit_code = kExitNonStabilizing;
    out.report = {{"error", error_json("non_stabilizing", e.what())}};
  } catch (const RegionExitError& e) {
    out.exit_code = kExitRegionExit;
    json err = error_json("region_exit", e.what());
    err["last_iterate"] = e.last_iterate();
    err["residual"] = number(e.residual());
    out.report = {{"error", err}};
  } catch (const DomainError& e) {
    out.exit_code = kExitParse;
    out.report = {{"error", error_json("domain", e.what())}};
  } catch (const Error& e) {
    out.exit_code = kExitFailure;
    out.report = {{"error", error_json("failure", e.what())}};
  }
  json report = head;
  report.update(out.report);
  report["exit_code"] = out.exit_code;
  out.report = std::move(report);
  return out;
}

std::string render_human(const json& r) {
  std::ostringstream os;
  os << "command: " << r.value("command", "?") << "\n";
  if (r.contains("error")) {
    const json& e = r["error"];
    os << "error (" << e.value("kind", "?") << "): " << e.value("message", "");
    if (e.contains("pointer")) os << " at " << e["pointer"].get<std::string>();
    os << "\n";
    if (e.contains("last_iterate")) os << "last iterate: " << e["last_iterate"].dump() << "\n";
  }
  if (r.contains("result")) {
    const json& res = r["result"];
    if (res.contains("verdict")) os << "verdict: " << res["verdict"].get<std::string>() << "\n";
    if (res.contains("conditions")) {
      for (const json& c : res["conditions"]) {
        os << "  " << c["label"].get<std::string>() << "  " << c["residual"].dump() << "  "
           << c["verdict"].get<std::string>() << "\n";
      }
    }
    if (res.contains("warnings")) {
      for (const json& w : res["warnings"]) os << "  warning: " << w.get<std::string>() << "\n";
    }
    if (res.contains("blocks") && res["blocks"].is_array()) {
      os << "blocks (d, m):";
      for (const json& b : res["blocks"]) os << " (" << b["d"] << ", " << b["m"] << ")";
      os << "\nreconstruction residual: " << res.value("reconstruction_residual", json()).dump() << "\n";
    }
    if (res.contains("gap")) {
      os << "ssa gap: " << res["gap"]["entropy_form"].dump() << "\nequality: " << res["equality"].dump() << "\n";
      if (res["structure"].is_object()) {
        os << "blocks on H_B (dim H^L, dim H^R):";
        for (const json& b : res["structure"]["blocks"]) os << " (" << b["d"] << ", " << b["m"] << ")";
        os << "\n";
      }
    }
    if (res.contains("fits")) {
      for (const json& f : res["fits"]) os << "theta " << f["theta"].dump() << " -> xi " << f["xi"].dump() << "\n";
    }
    for (const char* key : {"subalgebra", "commutative", "channel"}) {
      if (res.contains(key) && res[key].is_object()) {
        os << key << ": " << res[key]["verdict"].get<std::string>() << "\n";
      }
    }
    if (res.contains("checks")) {
      for (const json& c : res["checks"]) {
        os << "  " << c["name"].get<std::string>() << "  " << c["residual"].dump() << " <= " << c["tolerance"].dump()
           << (c["ok"].get<bool>() ? "  ok" : "  FAILED") << "\n";
      }
      os << "rerun matches: " << res["rerun_matches"].dump() << "\nok: " << res["ok"].dump() << "\n";
    }
  }
  os << "exit code: " << r.value("exit_code", -1) << "\n";
  return os.str();
}

}  // namespace qsuff::cli
