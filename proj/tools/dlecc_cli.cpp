// Command-line front end. Talks to the library only through dlecc.h.
#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>
#include <json.hpp>

#include "dlecc/dlecc.h"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kVerification = 2, kNumerical = 3 };

struct CliError {
  int code;
  std::string message;
};

int exit_code(dlecc_status s) {
  switch (s) {
    case DLECC_OK: return kOk;
    case DLECC_VERIFICATION: return kVerification;
    case DLECC_NUMERICAL: return kNumerical;
    default: return kUsage;
  }
}

void check(dlecc_status s) {
  if (s != DLECC_OK) throw CliError{exit_code(s), std::string(dlecc_status_name(s)) + ": " + dlecc_last_error()};
}

// Owning wrappers for the C handles.
template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Table = Handle<dlecc_table, dlecc_table_free>;
using Spectrum = Handle<dlecc_spectrum, dlecc_spectrum_free>;
using Query = Handle<dlecc_query, dlecc_query_free>;
using GlResult = Handle<dlecc_gl_result, dlecc_gl_result_free>;
using Encoder = Handle<dlecc_encoder, dlecc_encoder_free>;
using Theta = Handle<dlecc_theta, dlecc_theta_free>;
using TrainResult = Handle<dlecc_train_result, dlecc_train_result_free>;

std::string take(char* s) {
  std::string out = s ? s : "";
  dlecc_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kUsage, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw CliError{kUsage, "cannot write " + path};
}

// Same digest as `git hash-object`.
std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  const std::string blob = header + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw CliError{kUsage, "SHA-1 unavailable"};
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

struct Manifest {
  std::string command;
  json flags = json::object();
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> inputs;  // path -> content hash
  std::vector<std::string> outputs;

  void input(const std::string& path, const std::string& content) { inputs[path] = git_blob_sha1(content); }

  void write(const std::string& path, const std::vector<std::string>& argv) const {
    json j;
    j["command"] = command;
    j["argv"] = argv;
    j["flags"] = flags;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["inputs"] = json::object();
    for (const auto& [p, h] : inputs) j["inputs"][p] = {{"sha1", h}};
    j["outputs"] = outputs;
    j["library_version"] = dlecc_version();
    write_file(path, j.dump(2) + "\n");
  }
};

void record_flags(const CLI::App& app, Manifest& m) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string key = "--" + opt->get_lnames().front();
    if (opt->get_expected_min() == 0) {
      m.flags[key] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto r = opt->results();
      m.flags[key] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      m.flags[key] = opt->get_default_str();
    }
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw CliError{kUsage, "not a number: " + t};
    }
  }
  return v;
}

std::vector<std::uint64_t> parse_counts(const std::string& s) {
  std::vector<std::uint64_t> v;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw CliError{kUsage, "not a count: " + t};
    }
  }
  return v;
}

Table load_table(const std::string& fixture, const std::string& path, Manifest& m) {
  dlecc_table* t = nullptr;
  if (!fixture.empty()) {
    check(dlecc_table_fixture(fixture.c_str(), &t));
  } else {
    const std::string text = read_file(path);
    m.input(path, text);
    check(dlecc_table_from_json(text.c_str(), &t));
  }
  return Table(t);
}

// "bent", "bent-partner", "parity:M1,M2,M3" (decimal subset masks) or a theta JSON file.
Theta load_theta(const std::string& spec, Manifest& m) {
  dlecc_theta* t = nullptr;
  if (spec == "bent") {
    check(dlecc_theta_bent(&t));
  } else if (spec == "bent-partner") {
    check(dlecc_theta_bent_partner(&t));
  } else if (spec.rfind("parity:", 0) == 0) {
    const auto masks = parse_counts(spec.substr(7));
    if (masks.size() != 3) throw CliError{kUsage, "parity needs three masks"};
    const std::uint32_t mm[3] = {static_cast<std::uint32_t>(masks[0]), static_cast<std::uint32_t>(masks[1]),
                                 static_cast<std::uint32_t>(masks[2])};
    check(dlecc_theta_parity(mm, &t));
  } else {
    const std::string text = read_file(spec);
    m.input(spec, text);
    check(dlecc_theta_from_json(text.c_str(), &t));
  }
  return Theta(t);
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier analysis, Goldreich-Levin probing and training of learned Turbo-like codes"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  const std::vector<std::string> args(argv, argv + argc);

  // fourier
  auto* fourier = app.add_subcommand("fourier", "Walsh-Hadamard spectrum and energy profile of a table");
  std::string f_fixture, f_table, f_spectrum = "spectrum.json", f_energy = "energy.csv";
  double f_threshold = 0.95;
  auto* f_fix_opt = fourier->add_option("--fixture", f_fixture, "named fixture (see --list)");
  fourier->add_option("--table", f_table, "table JSON file")->excludes(f_fix_opt);
  fourier->add_option("--threshold", f_threshold, "energy fraction")->capture_default_str();
  fourier->add_option("--spectrum", f_spectrum, "spectrum output")->capture_default_str();
  fourier->add_option("--energy", f_energy, "energy CSV output")->capture_default_str();
  bool f_list = false;
  fourier->add_flag("--list", f_list, "print fixture names and exit");

  // gl
  auto* gl = app.add_subcommand("gl", "Goldreich-Levin search for heavy Fourier coefficients");
  std::string g_fixture, g_table, g_process, g_out = "gl.json", g_sweep, g_sweep_out = "sweep.csv";
  std::size_t g_n = 100, g_position = 0, g_runs = 1;
  double g_gamma = 0.5;
  std::uint64_t g_queries = 800, g_seed = 0;
  bool g_auto = false;
  auto* g_fix_opt = gl->add_option("--fixture", g_fixture, "named fixture embedded in n inputs");
  auto* g_tab_opt = gl->add_option("--table", g_table, "table JSON embedded in n inputs")->excludes(g_fix_opt);
  gl->add_option("--process", g_process, "shell command answering one query per line")
      ->excludes(g_fix_opt)
      ->excludes(g_tab_opt);
  gl->add_option("--n", g_n, "input length")->capture_default_str();
  gl->add_option("--position", g_position, "0-based coordinate of the first table variable")->capture_default_str();
  auto* g_gamma_opt = gl->add_option("--gamma", g_gamma, "threshold")->capture_default_str();
  gl->add_flag("--auto", g_auto, "choose gamma by the stability search")->excludes(g_gamma_opt);
  gl->add_option("--queries", g_queries, "pair samples per estimate")->capture_default_str();
  gl->add_option("--runs", g_runs, "independent seeded runs")->capture_default_str();
  gl->add_option("--seed", g_seed)->capture_default_str();
  gl->add_option("--sweep", g_sweep, "comma-separated query budgets for a convergence sweep");
  gl->add_option("--sweep-out", g_sweep_out, "sweep CSV output")->capture_default_str();
  gl->add_option("--out", g_out, "result JSON")->capture_default_str();

  // landscape
  auto* land = app.add_subcommand("landscape", "Loss along the line between two encoder parameterizations");
  std::string l_a, l_b, l_out = "landscape.csv";
  dlecc_loss_options lopt;
  dlecc_loss_options_default(&lopt);
  std::size_t l_grid = 21;
  land->add_option("--theta-a", l_a, "bent | bent-partner | parity:M1,M2,M3 | theta JSON")->required();
  land->add_option("--theta-b", l_b, "bent | bent-partner | parity:M1,M2,M3 | theta JSON")->required();
  land->add_option("--k", lopt.k, "block length")->capture_default_str();
  land->add_option("--snr", lopt.snr_db, "SNR in dB")->capture_default_str();
  land->add_option("--blocks", lopt.blocks, "blocks per point")->capture_default_str();
  land->add_option("--iterations", lopt.iterations, "turbo iterations")->capture_default_str();
  land->add_option("--grid", l_grid, "evenly spaced lambda points in [0, 1]")->capture_default_str();
  land->add_option("--seed", lopt.seed)->capture_default_str();
  land->add_option("--out", l_out, "CSV output")->capture_default_str();

  // train-encoder
  auto* train = app.add_subcommand("train-encoder", "Train encoder tables against estimated conditional entropy");
  dlecc_train_config tcfg;
  dlecc_train_config_default(&tcfg);
  std::string t_init = "normal", t_out = "params.json", t_trace = "trace.csv", t_curve = "curve.csv";
  train->add_option("--k-enc", tcfg.k_enc, "training block length")->capture_default_str();
  train->add_option("--window", tcfg.window, "encoder window")->capture_default_str();
  train->add_option("--steps", tcfg.steps)->capture_default_str();
  train->add_option("--batch", tcfg.batch_size)->capture_default_str();
  train->add_option("--lr", tcfg.learning_rate)->capture_default_str();
  train->add_option("--snr", tcfg.snr_db, "SNR in dB")->capture_default_str();
  train->add_option("--seed", tcfg.seed)->capture_default_str();
  train->add_option("--snapshot-every", tcfg.snapshot_every)->capture_default_str();
  train->add_option("--init", t_init)->check(CLI::IsMember({"normal", "parity"}))->capture_default_str();
  train->add_option("--out", t_out, "params JSON")->capture_default_str();
  train->add_option("--trace", t_trace, "Fourier coefficient evolution CSV")->capture_default_str();
  train->add_option("--curve", t_curve, "learning curve CSV")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "BER/BCE of trained params with the iterative decoder");
  dlecc_eval_options eopt;
  dlecc_eval_options_default(&eopt);
  std::string e_params, e_grid = "-1.5,0,1,2", e_out = "eval.csv";
  eval->add_option("--params", e_params, "params JSON")->required();
  eval->add_option("--k-eval", eopt.k_eval)->capture_default_str();
  eval->add_option("--snr-grid", e_grid)->capture_default_str();
  eval->add_option("--blocks", eopt.blocks)->capture_default_str();
  eval->add_option("--iterations", eopt.iterations)->capture_default_str();
  eval->add_option("--seed", eopt.seed)->capture_default_str();
  eval->add_option("--out", e_out)->capture_default_str();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Tightness of both sides of the BCE/BER bound");
  std::size_t b_grid = 50;
  std::string b_out = "bounds.csv";
  bounds->add_option("--grid", b_grid)->capture_default_str();
  bounds->add_option("--out", b_out)->capture_default_str();

  // counterexample
  auto* counter = app.add_subcommand("counterexample", "BER and BCE minimizers on the 4x4 counterexample channel");
  std::string c_out;
  counter->add_option("--out", c_out, "optional CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Manifest m;
    CLI::App* sub = app.get_subcommands().front();
    m.command = sub->get_name();
    record_flags(*sub, m);
    m.flags["--threads"] = threads;

    if (sub == fourier) {
      if (f_list) {
        std::cout << take([] {
          char* s = nullptr;
          check(dlecc_fixture_names(&s));
          return s;
        }());
        return kOk;
      }
      if (f_fixture.empty() && f_table.empty()) throw CliError{kUsage, "one of --fixture or --table is required"};
      Table t = load_table(f_fixture, f_table, m);
      dlecc_spectrum* sp = nullptr;
      check(dlecc_wht_forward(t.get(), &sp));
      Spectrum spec(sp);
      char* js = nullptr;
      check(dlecc_spectrum_to_json(spec.get(), &js));
      write_file(f_spectrum, take(js));
      char* csv = nullptr;
      std::size_t entries = 0;
      check(dlecc_energy_profile_csv(spec.get(), f_threshold, &csv, &entries));
      write_file(f_energy, take(csv));
      std::cout << entries << " coefficient(s) carry " << f_threshold << " of the energy\n";
      m.outputs = {f_spectrum, f_energy};
      m.write(manifest_path(f_spectrum), args);
      return kOk;
    }

    if (sub == gl) {
      Query q;
      dlecc_query* raw = nullptr;
      if (!g_process.empty()) {
        check(dlecc_query_from_process(g_process.c_str(), g_n, &raw));
      } else {
        if (g_fixture.empty() && g_table.empty())
          throw CliError{kUsage, "one of --fixture, --table or --process is required"};
        Table t = load_table(g_fixture, g_table, m);
        check(dlecc_query_from_table(t.get(), g_n, g_position, &raw));
      }
      q.reset(raw);
      m.seed = g_seed;
      json out;
      if (g_auto) {
        double gamma = 0.0;
        char* report = nullptr;
        check(dlecc_gamma_search(q.get(), std::max<std::size_t>(g_runs, 2), g_queries, g_seed, &gamma, nullptr,
                                 &report));
        out = json::parse(take(report));
        std::cout << "gamma = " << gamma << "\n";
      } else {
        dlecc_gl_config cfg;
        dlecc_gl_config_default(&cfg);
        cfg.gamma = g_gamma;
        cfg.queries_per_estimate = g_queries;
        json runs = json::array();
        std::vector<GlResult> results;
        for (std::size_t r = 0; r < g_runs; ++r) {
          cfg.seed = g_seed + r;
          dlecc_gl_result* res = nullptr;
          check(dlecc_goldreich_levin(q.get(), &cfg, &res));
          results.emplace_back(res);
          char* js = nullptr;
          check(dlecc_gl_result_to_json(res, &js));
          json j = json::parse(take(js));
          j["seed"] = cfg.seed;
          runs.push_back(j);
        }
        std::size_t agree = 0;
        for (const auto& r : results) agree += dlecc_gl_result_same_sets(r.get(), results.front().get());
        out = {{"gamma", g_gamma}, {"runs", runs}, {"runs_agreeing_with_first", agree}};
        std::cout << dlecc_gl_result_size(results.front().get()) << " set(s) in run 0; " << agree << "/" << g_runs
                  << " runs agree\n";
      }
      out["evaluations"] = dlecc_query_evaluations(q.get());
      write_file(g_out, out.dump(2) + "\n");
      m.outputs = {g_out};
      if (!g_sweep.empty()) {
        const auto grid = parse_counts(g_sweep);
        char* csv = nullptr;
        check(dlecc_gl_sweep_csv(q.get(), g_gamma, grid.data(), grid.size(), g_runs, g_seed, &csv));
        write_file(g_sweep_out, take(csv));
        m.outputs.push_back(g_sweep_out);
      }
      m.write(manifest_path(g_out), args);
      return kOk;
    }

    if (sub == land) {
      if (l_grid < 2) throw CliError{kUsage, "--grid must be at least 2"};
      lopt.threads = threads;
      Theta a = load_theta(l_a, m);
      Theta b = load_theta(l_b, m);
      std::vector<double> lambdas(l_grid);
      for (std::size_t i = 0; i < l_grid; ++i) lambdas[i] = static_cast<double>(i) / static_cast<double>(l_grid - 1);
      char* csv = nullptr;
      check(dlecc_line_probe(a.get(), b.get(), lambdas.data(), lambdas.size(), &lopt, nullptr, nullptr, nullptr,
                             &csv));
      write_file(l_out, take(csv));
      m.seed = lopt.seed;
      m.outputs = {l_out};
      m.write(manifest_path(l_out), args);
      return kOk;
    }

    if (sub == train) {
      tcfg.init = t_init == "parity" ? DLECC_INIT_PARITY : DLECC_INIT_NORMAL;
      tcfg.threads = threads;
      dlecc_train_result* raw = nullptr;
      check(dlecc_train_encoder(&tcfg, &raw));
      TrainResult res(raw);
      dlecc_encoder* enc = nullptr;
      check(dlecc_train_result_encoder(res.get(), &enc));
      Encoder e(enc);
      char* s = nullptr;
      check(dlecc_encoder_to_json(e.get(), &s));
      write_file(t_out, take(s));
      check(dlecc_train_result_fc_csv(res.get(), &s));
      write_file(t_trace, take(s));
      check(dlecc_train_result_curve_csv(res.get(), &s));
      write_file(t_curve, take(s));
      m.seed = tcfg.seed;
      m.outputs = {t_out, t_trace, t_curve};
      m.write(manifest_path(t_out), args);
      if (const char* why = dlecc_train_result_aborted(res.get())) {
        std::cerr << "training stopped: " << why << "\n";
        return kNumerical;
      }
      return kOk;
    }

    if (sub == eval) {
      eopt.threads = threads;
      const std::string text = read_file(e_params);
      m.input(e_params, text);
      dlecc_encoder* enc = nullptr;
      check(dlecc_encoder_from_json(text.c_str(), &enc));
      Encoder e(enc);
      const auto grid = parse_doubles(e_grid);
      if (grid.empty()) throw CliError{kUsage, "empty --snr-grid"};
      char* csv = nullptr;
      check(dlecc_evaluate(e.get(), grid.data(), grid.size(), &eopt, &csv, nullptr));
      const std::string table = take(csv);
      write_file(e_out, table);
      std::cout << table;
      m.seed = eopt.seed;
      m.outputs = {e_out};
      m.write(manifest_path(e_out), args);
      return kOk;
    }

    if (sub == bounds) {
      char* csv = nullptr;
      double up = 0.0, lo = 0.0;
      check(dlecc_bounds(b_grid, &csv, &up, &lo));
      write_file(b_out, take(csv));
      m.outputs = {b_out};
      m.write(manifest_path(b_out), args);
      std::cout << "max |C - H2(B)| = " << up << ", max |C - 2B| = " << lo << "\n";
      if (up > 1e-12 || lo > 1e-12) {
        std::cerr << "tightness check failed\n";
        return kVerification;
      }
      return kOk;
    }

    if (sub == counter) {
      char* csv = nullptr;
      int disjoint = 0;
      check(dlecc_counterexample(&csv, &disjoint));
      const std::string table = take(csv);
      std::cout << "f        B        C\n";
      for (const auto& line : split(table, '\n')) {
        if (line.rfind("f,", 0) == 0) continue;
        // "[a,b]",ber,bce,...
        const auto close = line.find("]\"");
        const auto cells = split(line.substr(close + 3), ',');
        std::printf("%-8s %.5f  %.4f\n", line.substr(1, close).c_str(), std::stod(cells[0]), std::stod(cells[1]));
      }
      if (!c_out.empty()) {
        write_file(c_out, table);
        m.outputs = {c_out};
        m.write(manifest_path(c_out), args);
      }
      if (!disjoint) {
        std::cerr << "BER and BCE minimizers overlap\n";
        return kVerification;
      }
      std::cout << "BER and BCE minimizers are disjoint\n";
      return kOk;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
