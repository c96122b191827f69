#include "cli.hpp"

#include "facered/completion_edm.hpp"
#include "facered/completion_psd.hpp"
#include "facered/conic.hpp"
#include "facered/error.hpp"
#include "facered/lifts.hpp"
#include "facered/lrmc.hpp"
#include "facered/pathologies.hpp"
#include "facered/problem_io.hpp"
#include "facered/sos.hpp"
#include "facered/text_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace facered::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  double tol = 1e-9;
  std::uint64_t seed = 1;
  Index max_steps = -1;
  std::string finder = "diag";
  std::string out;
  std::string trace;
};

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  f << data;
}

// "k=v,k=v" → map. Throws Parse on malformed items.
std::map<std::string, std::string> parse_kv(const std::string& spec) {
  std::map<std::string, std::string> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Parse, "bad generator item '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& spec) : kv_(parse_kv(spec)) {}
  double real(const std::string& k, double dflt) {
    used_.insert(k);
    return kv_.count(k) ? parse_double(kv_.at(k)) : dflt;
  }
  long long integer(const std::string& k, long long dflt) {
    used_.insert(k);
    return kv_.count(k) ? parse_int(kv_.at(k)) : dflt;
  }
  void finish() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw Error(ErrorKind::Parse, "unknown generator key '" + k + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

Finder parse_finder(const std::string& s) {
  if (s == "diag") return Finder::Diag;
  if (s == "dd") return Finder::DiagDominant;
  throw Error(ErrorKind::Parse, "unknown finder '" + s + "'");
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json exponent_list(const MonomialSet& m) {
  json a = json::array();
  for (const Exponent& e : m) a.push_back(e);
  return a;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
      return kParse;
    case ErrorKind::FaceTooBig:
    case ErrorKind::RankMismatch:
    case ErrorKind::IterationLimit:
      return kDiagnostic;
    default:
      return kInvalid;
  }
}

struct Report {
  json j;
  explicit Report(const std::string& command) {
    j["command"] = command;
    j["input_digest"] = nullptr;
    j["diagnostics"] = json::array();
    j["metrics"] = json::object();
  }
  json& metrics() { return j["metrics"]; }
  void diagnostic(const std::string& s) { j["diagnostics"].push_back(s); }
};

void cmd_reduce(const Options& o, const std::string& input, Report& r) {
  const std::string text = slurp(input);
  r.j["input_digest"] = fnv1a(text);
  std::istringstream in(text);
  const ConicProblem p = read_problem(in);
  const ReductionTrace tr = facially_reduce(p, parse_finder(o.finder), o.max_steps, o.tol);
  json steps = json::array();
  json detail = json::array();
  for (size_t k = 0; k < tr.steps.size(); ++k) {
    const TraceStep& s = tr.steps[k];
    steps.push_back({{"step", k + 1}, {"exposing_rank", s.exposing_rank}, {"order", s.new_order},
                     {"constraints", s.constraints}});
    detail.push_back({{"step", k + 1}, {"certificate", vec_json(s.certificate)},
                      {"exposing_rank", s.exposing_rank}, {"order", s.new_order}});
  }
  r.j["steps"] = steps;
  auto& m = r.metrics();
  m["order"] = p.n();
  m["constraints"] = p.m();
  m["finder"] = o.finder;
  m["witness_degree"] = tr.witness_degree();
  m["reduced_order"] = tr.final.n();
  m["reduced_constraints"] = tr.final.m();
  if (!o.out.empty()) {
    std::ostringstream s;
    write_problem(s, tr.final);
    write_file(o.out, s.str());
  }
  if (!o.trace.empty()) write_file(o.trace, json{{"steps", detail}}.dump(2) + "\n");
}

void cmd_fixtures(const Options& o, Report& r) {
  if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "fixtures needs --out DIR");
  std::filesystem::create_directories(o.out);
  json list = json::array();
  for (const LabeledInstance& li : all_fixtures()) {
    std::ostringstream s;
    write_problem(s, li.problem);
    const std::string path = (std::filesystem::path(o.out) / (li.name + ".sdpa")).string();
    write_file(path, s.str());
    json e{{"name", li.name}, {"file", path}, {"order", li.problem.n()}, {"constraints", li.problem.m()}};
    e["expected_degree"] = li.expected_degree ? json(*li.expected_degree) : json(nullptr);
    e["v_p"] = li.v_p ? json(*li.v_p) : json(nullptr);
    e["v_d"] = li.v_d ? json(*li.v_d) : json(nullptr);
    list.push_back(e);
  }
  r.j["fixtures"] = list;
  r.metrics()["count"] = list.size();
}

void cmd_complete_psd(const Options& o, const std::string& input, Report& r) {
  const std::string text = slurp(input);
  r.j["input_digest"] = fnv1a(text);
  std::istringstream in(text);
  const PartialMatrix p = read_partial(in);
  const CompletionReduction red = reduce_completion(p, o.tol);
  for (const std::string& w : red.warnings) r.diagnostic(w);
  auto& m = r.metrics();
  m["order"] = p.graph.n();
  m["edges"] = p.graph.num_edges();
  m["chordal"] = red.chordality.chordal;
  m["cliques"] = red.cliques.size();
  m["face_dim"] = red.face.dim();
  const std::optional<SymMatrix> x = complete(p, red.face, 20000, o.tol);
  if (!x) throw Error(ErrorKind::FaceTooBig, "no PSD completion found on the reduced face");
  double resid = 0.0;
  for (Index k = 0; k < p.graph.num_edges(); ++k) {
    const Edge& e = p.graph.edges()[static_cast<size_t>(k)];
    resid = std::max(resid, std::abs((*x)(e.first, e.second) - p.values(k)));
  }
  m["residual"] = resid;
  m["min_eigenvalue"] = min_eigenvalue(*x);
  if (!o.out.empty()) {
    std::ostringstream s;
    write_matrix(s, x->mat());
    write_file(o.out, s.str());
  }
}

void cmd_snl(const Options& o, const std::string& input, const std::string& gen, std::optional<double> noise,
             std::optional<double> residual_tol, Report& r) {
  SnlInstance inst;
  double used_noise = noise.value_or(0.0);
  if (!gen.empty()) {
    if (!input.empty()) throw Error(ErrorKind::InvalidArgument, "give either an input file or --gen");
    KeyValues kv(gen);
    const long long n = kv.integer("n", 50);
    const long long anchors = kv.integer("anchors", 4);
    const double range = kv.real("range", 0.5);
    const long long dim = kv.integer("r", 2);
    const auto seed = static_cast<std::uint64_t>(kv.integer("seed", static_cast<long long>(o.seed)));
    used_noise = kv.real("noise", used_noise);
    kv.finish();
    inst = snl_generate(n, anchors, range, dim, seed, used_noise);
    r.j["input_digest"] = fnv1a(gen + (noise ? ";noise=" + format_double(*noise) : ""));
  } else {
    if (input.empty()) throw Error(ErrorKind::InvalidArgument, "snl needs an input file or --gen");
    const std::string text = slurp(input);
    r.j["input_digest"] = fnv1a(text);
    std::istringstream in(text);
    inst = read_snl(in);
  }
  SnlOptions opt;
  opt.tol = o.tol;
  opt.residual_tol = residual_tol.value_or(used_noise > 0.0 ? 0.1 : 1e-6);
  auto& m = r.metrics();
  m["n"] = inst.edm.n();
  m["r"] = inst.edm.r;
  m["edges"] = inst.edm.graph.num_edges();
  m["anchors"] = inst.anchors.size();
  const SnlResult res = snl_localize(inst, opt);
  m["cliques"] = res.cliques;
  m["face_dim"] = res.face_dim;
  m["achieved_dim"] = res.achieved_dim;
  m["max_edge_misfit"] = res.max_edge_misfit;
  m["rmsd"] = res.rmsd ? json(*res.rmsd) : json(nullptr);
  if (!o.out.empty()) {
    std::ostringstream s;
    write_points_csv(s, res.points);
    write_file(o.out, s.str());
  }
}

void cmd_lrmc(const Options& o, const std::string& input, const std::string& gen, double residual_tol,
              Report& r) {
  BipartiteObservations obs;
  std::optional<Matrix> truth;
  if (!gen.empty()) {
    if (!input.empty()) throw Error(ErrorKind::InvalidArgument, "give either an input file or --gen");
    KeyValues kv(gen);
    const long long m = kv.integer("m", 100);
    const long long n = kv.integer("n", 200);
    const long long rank = kv.integer("r", 4);
    const double density = kv.real("density", 0.36);
    const auto seed = static_cast<std::uint64_t>(kv.integer("seed", static_cast<long long>(o.seed)));
    kv.finish();
    PlantedLrmc p = lrmc_generate(m, n, rank, density, seed);
    obs = std::move(p.obs);
    truth = std::move(p.truth);
    r.j["input_digest"] = fnv1a(gen);
  } else {
    if (input.empty()) throw Error(ErrorKind::InvalidArgument, "lrmc needs an input file or --gen");
    const std::string text = slurp(input);
    r.j["input_digest"] = fnv1a(text);
    std::istringstream in(text);
    obs = read_lrmc(in);
  }
  const LrmcResult res = lrmc_recover(obs, o.tol, residual_tol);
  for (const std::string& w : res.warnings) r.diagnostic(w);
  auto& m = r.metrics();
  m["m"] = obs.m();
  m["n"] = obs.n();
  m["r"] = obs.r();
  m["observed"] = obs.entries().size();
  m["blocks"] = res.blocks;
  m["row_face_dim"] = res.row_dim;
  m["col_face_dim"] = res.col_dim;
  m["rank"] = res.rank;
  m["residual"] = res.residual;
  if (!res.z) throw Error(*res.diagnostic, res.message);
  if (truth) m["heldout_residual"] = heldout_residual(obs, *res.z, *truth);
  if (!o.out.empty()) {
    std::ostringstream s;
    write_matrix_csv(s, *res.z);
    write_file(o.out, s.str());
  }
}

Matrix load_matrix(const std::string& path) {
  const std::string text = slurp(path);
  std::istringstream in(text);
  return read_matrix(in);
}

Matrix random_symmetric(Index n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> g(0, 9);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = i == j ? 0 : g(rng);
  return a;
}

void cmd_lift(const Options& o, const std::string& kind, const std::string& flow, const std::string& dist,
              const std::string& cost, const std::string& weights, const std::string& gen, Report& r) {
  std::string digest_src = kind + ";" + gen;
  LiftedProblem lp;
  auto& m = r.metrics();
  std::mt19937_64 rng(o.seed);
  Index gen_n = -1;
  if (!gen.empty()) {
    KeyValues kv(gen);
    gen_n = kv.integer("n", 3);
    rng.seed(static_cast<std::uint64_t>(kv.integer("seed", static_cast<long long>(o.seed))));
    kv.finish();
    if (gen_n < 2) throw Error(ErrorKind::InvalidArgument, "generated lifts need n >= 2");
  }
  if (kind == "qap") {
    Matrix f, d, c;
    if (gen_n > 0) {
      f = random_symmetric(gen_n, rng);
      d = random_symmetric(gen_n, rng);
      c = Matrix::Zero(gen_n, gen_n);
    } else {
      if (flow.empty() || dist.empty()) throw Error(ErrorKind::InvalidArgument, "qap needs --flow and --dist");
      f = load_matrix(flow);
      d = load_matrix(dist);
      c = cost.empty() ? Matrix::Zero(f.rows(), f.rows()) : load_matrix(cost);
      digest_src += slurp(flow) + slurp(dist) + (cost.empty() ? "" : slurp(cost));
    }
    if (f.rows() != f.cols()) throw Error(ErrorKind::DimensionMismatch, "F must be square");
    if ((f - f.transpose()).norm() > 0.0 || (d - d.transpose()).norm() > 0.0) {
      throw Error(ErrorKind::InvalidArgument, "F and D must be symmetric");
    }
    const Index n = f.rows();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "QAP needs n >= 2");
    lp = qap_reduced(f, d, c);
    m["n"] = n;
    m["unreduced_constraints"] = qap_unreduced_constraint_count(n);
    m["gangster_constraints"] = lp.reduced.m();
  } else if (kind == "maxcut") {
    Matrix w;
    if (gen_n > 0) {
      w = random_symmetric(gen_n, rng);
    } else {
      if (weights.empty()) throw Error(ErrorKind::InvalidArgument, "maxcut needs --weights");
      w = load_matrix(weights);
      digest_src += slurp(weights);
    }
    if (w.rows() != w.cols()) throw Error(ErrorKind::DimensionMismatch, "weights must be square");
    lp = maxcut_second_lift(w);
    m["n"] = w.rows();
    m["index_constraints"] = lp.constraints.size();
  } else {
    throw Error(ErrorKind::Parse, "unknown lift '" + kind + "' (expected qap or maxcut)");
  }
  r.j["input_digest"] = fnv1a(digest_src);
  m["lifted_order"] = lp.order;
  m["exposing_rank"] = lp.order - lp.basis.cols();
  m["order"] = lp.reduced.n();
  m["constraints"] = lp.reduced.m();
  if (!o.out.empty()) {
    std::ostringstream s;
    write_problem(s, lp.reduced);
    write_file(o.out, s.str());
  }
}

void cmd_sos(const Options& o, const std::string& input, const std::string& gram, Report& r) {
  const std::string text = slurp(input);
  r.j["input_digest"] = fnv1a(text);
  std::istringstream in(text);
  const SosInput data = read_poly(in);
  const EliminationResult res = eliminate(data.g0, data.gs, static_cast<int>(o.max_steps));
  json steps = json::array();
  for (size_t k = 0; k < res.steps.size(); ++k)
    steps.push_back({{"step", k + 1}, {"removed", exponent_list(res.steps[k].removed)}});
  r.j["steps"] = steps;
  auto& m = r.metrics();
  m["variables"] = data.g0.n();
  m["constraints"] = data.gs.size();
  m["initial_size"] = res.initial.size();
  m["final_size"] = res.final.size();
  m["type1_initial"] = is_type1(res.initial);
  r.j["initial_monomials"] = exponent_list(res.initial);
  r.j["final_monomials"] = exponent_list(res.final);
  if (!o.out.empty()) {
    std::ostringstream s;
    write_monomials(s, res.final);
    write_file(o.out, s.str());
  }
  if (!gram.empty()) {
    if (!data.gs.empty()) throw Error(ErrorKind::InvalidArgument, "the Gram system needs a single polynomial");
    std::ostringstream s;
    write_problem(s, gram_system(data.g0, res.final));
    write_file(gram, s.str());
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Facial reduction toolkit for conic problems", "facered"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tol", o.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for generators")->capture_default_str();
  app.add_option("--max-steps", o.max_steps, "cap on reduction or elimination steps (-1: none)");
  app.add_option("--finder", o.finder, "LP certificate finder")->check(CLI::IsMember({"diag", "dd"}));
  app.add_option("--out", o.out, "primary output file (directory for fixtures)");
  app.add_option("--trace", o.trace, "write per-step certificates as JSON");

  std::string input, gen, kind, flow, dist, cost, weights, gram;
  std::optional<double> noise, snl_residual;
  double lrmc_residual = 1e-8;

  auto* reduce = app.add_subcommand("reduce", "facially reduce an SDPA-like problem");
  reduce->add_option("input", input, "problem file")->required();
  auto* psd = app.add_subcommand("complete-psd", "PSD completion via clique faces");
  psd->add_option("input", input, "psdc file")->required();
  auto* snl = app.add_subcommand("snl", "sensor network localization");
  snl->add_option("input", input, "snl file");
  snl->add_option("--gen", gen, "generator spec, e.g. n=50,anchors=4,range=0.5,seed=1");
  snl->add_option("--noise", noise, "multiplicative distance noise for --gen");
  snl->add_option("--residual-tol", snl_residual, "accepted relative edge misfit");
  auto* lrmc = app.add_subcommand("lrmc", "low-rank matrix completion");
  lrmc->add_option("input", input, "lrmc file");
  lrmc->add_option("--gen", gen, "generator spec, e.g. m=100,n=200,r=4,density=0.36,seed=1");
  lrmc->add_option("--residual-tol", lrmc_residual, "accepted observed-entry residual")->capture_default_str();
  auto* lift = app.add_subcommand("lift", "SDP lifts of combinatorial problems");
  lift->add_option("kind", kind, "qap or maxcut")->required();
  lift->add_option("--flow", flow, "QAP flow matrix F");
  lift->add_option("--dist", dist, "QAP distance matrix D");
  lift->add_option("--cost", cost, "QAP linear cost C");
  lift->add_option("--weights", weights, "max-cut weight matrix");
  lift->add_option("--gen", gen, "random data, e.g. n=3,seed=1");
  auto* sos = app.add_subcommand("sos-eliminate", "monomial elimination for SOS programs");
  sos->add_option("input", input, "poly file")->required();
  sos->add_option("--gram", gram, "write the Gram system on the final basis");
  auto* fixtures = app.add_subcommand("fixtures", "export the pathology instances");
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kParse;
  }

  CLI::App* sub = app.get_subcommands().front();
  Report r(sub->get_name());
  const auto t0 = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (sub == reduce) {
      cmd_reduce(o, input, r);
    } else if (sub == psd) {
      cmd_complete_psd(o, input, r);
    } else if (sub == snl) {
      cmd_snl(o, input, gen, noise, snl_residual, r);
    } else if (sub == lrmc) {
      cmd_lrmc(o, input, gen, lrmc_residual, r);
    } else if (sub == lift) {
      cmd_lift(o, kind, flow, dist, cost, weights, gen, r);
    } else if (sub == sos) {
      cmd_sos(o, input, gram, r);
    } else if (sub == fixtures) {
      cmd_fixtures(o, r);
    }
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    r.j["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    err << e.what() << '\n';
  } catch (const std::exception& e) {
    code = kInvalid;
    r.j["error"] = {{"kind", "Internal"}, {"message", e.what()}};
    err << e.what() << '\n';
  }
  r.j["exit_code"] = code;
  r.j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << r.j.dump(2) << '\n';
  return code;
}

}  // namespace facered::cli
