#include "dlecc/dlecc.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "dlecc/boolfn.hpp"
#include "dlecc/channel.hpp"
#include "dlecc/codec.hpp"
#include "dlecc/error.hpp"
#include "dlecc/goldreich_levin.hpp"
#include "dlecc/landscape.hpp"
#include "dlecc/metrics.hpp"
#include "dlecc/serialize.hpp"
#include "dlecc/train.hpp"

struct dlecc_table {
  dlecc::PseudoBooleanTable value;
};
struct dlecc_spectrum {
  dlecc::FourierSpectrum value;
};
struct dlecc_query {
  dlecc::QueryFunction value;
};
struct dlecc_gl_result {
  dlecc::GLResult value;
};
struct dlecc_encoder {
  dlecc::TurboEncoderParams value;
};
struct dlecc_interleaver {
  dlecc::Interleaver value;
};
struct dlecc_theta {
  dlecc::ThetaTriple value;
};
struct dlecc_train_result {
  dlecc::TrainResult value;
};

namespace {

thread_local std::string g_last_error;

dlecc_status status_of(dlecc::ErrorKind kind) {
  switch (kind) {
    case dlecc::ErrorKind::InvalidArgument: return DLECC_INVALID_ARGUMENT;
    case dlecc::ErrorKind::Parse: return DLECC_PARSE;
    case dlecc::ErrorKind::Numerical: return DLECC_NUMERICAL;
    case dlecc::ErrorKind::Verification: return DLECC_VERIFICATION;
    case dlecc::ErrorKind::Io: return DLECC_IO;
  }
  return DLECC_INTERNAL;
}

template <class Fn>
dlecc_status guard(Fn&& fn) {
  try {
    fn();
    return DLECC_OK;
  } catch (const dlecc::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DLECC_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DLECC_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DLECC_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) dlecc::fail(dlecc::ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  if (out) *out = copy_string(s);
}

}  // namespace

extern "C" {

const char* dlecc_last_error(void) { return g_last_error.c_str(); }

const char* dlecc_status_name(dlecc_status status) {
  switch (status) {
    case DLECC_OK: return "ok";
    case DLECC_INVALID_ARGUMENT: return "invalid argument";
    case DLECC_PARSE: return "parse error";
    case DLECC_NUMERICAL: return "numerical failure";
    case DLECC_VERIFICATION: return "verification failure";
    case DLECC_IO: return "i/o error";
    case DLECC_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dlecc_version(void) { return "0.1.0"; }

void dlecc_string_free(char* s) { delete[] s; }

// ------------------------------------------------------------------ boolfn

dlecc_status dlecc_table_from_values(int arity, const double* values, size_t count, dlecc_table** out) {
  return guard([&] {
    need(out, "out");
    need(values, "values");
    *out = new dlecc_table{dlecc::PseudoBooleanTable(arity, std::vector<double>(values, values + count))};
  });
}

dlecc_status dlecc_table_from_json(const char* json, dlecc_table** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new dlecc_table{dlecc::table_from_json(json)};
  });
}

dlecc_status dlecc_table_fixture(const char* name, dlecc_table** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    const auto fixtures = dlecc::expression_fixtures();
    const auto it = fixtures.find(name);
    if (it == fixtures.end()) dlecc::fail(dlecc::ErrorKind::InvalidArgument, std::string("unknown fixture: ") + name);
    *out = new dlecc_table{it->second};
  });
}

dlecc_status dlecc_fixture_names(char** out) {
  return guard([&] {
    need(out, "out");
    std::string s;
    for (const auto& [name, table] : dlecc::expression_fixtures()) s += name + "\n";
    *out = copy_string(s);
  });
}

dlecc_status dlecc_table_to_json(const dlecc_table* table, char** out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    *out = copy_string(dlecc::table_to_json(table->value));
  });
}

int dlecc_table_arity(const dlecc_table* table) { return table ? table->value.arity() : -1; }

void dlecc_table_free(dlecc_table* table) { delete table; }

dlecc_status dlecc_wht_forward(const dlecc_table* table, dlecc_spectrum** out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    *out = new dlecc_spectrum{dlecc::wht_forward(table->value)};
  });
}

dlecc_status dlecc_wht_inverse(const dlecc_spectrum* spectrum, dlecc_table** out) {
  return guard([&] {
    need(spectrum, "spectrum");
    need(out, "out");
    *out = new dlecc_table{dlecc::wht_inverse(spectrum->value)};
  });
}

dlecc_status dlecc_spectrum_from_json(const char* json, dlecc_spectrum** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new dlecc_spectrum{dlecc::spectrum_from_json(json)};
  });
}

dlecc_status dlecc_spectrum_to_json(const dlecc_spectrum* spectrum, char** out) {
  return guard([&] {
    need(spectrum, "spectrum");
    need(out, "out");
    *out = copy_string(dlecc::spectrum_to_json(spectrum->value));
  });
}

dlecc_status dlecc_spectrum_coeffs(const dlecc_spectrum* spectrum, double* buffer, size_t capacity,
                                   size_t* count) {
  return guard([&] {
    need(spectrum, "spectrum");
    const auto c = spectrum->value.coeffs();
    if (count) *count = c.size();
    if (buffer)
      for (size_t i = 0; i < std::min(capacity, c.size()); ++i) buffer[i] = c[i];
  });
}

dlecc_status dlecc_energy_profile_csv(const dlecc_spectrum* spectrum, double threshold, char** csv,
                                      size_t* entries) {
  return guard([&] {
    need(spectrum, "spectrum");
    const auto profile = dlecc::energy_profile(spectrum->value, threshold);
    if (entries) *entries = profile.size();
    put_string(csv, dlecc::energy_csv(spectrum->value, profile));
  });
}

void dlecc_spectrum_free(dlecc_spectrum* spectrum) { delete spectrum; }

// --------------------------------------------------------- goldreich-levin

dlecc_status dlecc_query_from_table(const dlecc_table* table, size_t n, size_t position, dlecc_query** out) {
  return guard([&] {
    need(table, "table");
    need(out, "out");
    *out = new dlecc_query{dlecc::embed_table(table->value, n, position)};
  });
}

dlecc_status dlecc_query_from_process(const char* command, size_t n, dlecc_query** out) {
  return guard([&] {
    need(command, "command");
    need(out, "out");
    *out = new dlecc_query{dlecc::process_query(command, n)};
  });
}

uint64_t dlecc_query_evaluations(const dlecc_query* query) { return query ? query->value.queries() : 0; }

void dlecc_query_free(dlecc_query* query) { delete query; }

void dlecc_gl_config_default(dlecc_gl_config* cfg) {
  if (!cfg) return;
  const dlecc::GLConfig d;
  *cfg = {d.gamma, d.delta, d.queries_per_estimate, d.seed};
}

dlecc_status dlecc_goldreich_levin(const dlecc_query* query, const dlecc_gl_config* cfg, dlecc_gl_result** out) {
  return guard([&] {
    need(query, "query");
    need(cfg, "cfg");
    need(out, "out");
    const dlecc::GLConfig c{cfg->gamma, cfg->delta, cfg->queries_per_estimate, cfg->seed};
    *out = new dlecc_gl_result{dlecc::goldreich_levin(query->value, c)};
  });
}

dlecc_status dlecc_gamma_search(const dlecc_query* query, size_t runs_per_gamma, uint64_t queries, uint64_t seed,
                                double* gamma, dlecc_gl_result** out, char** report_json) {
  return guard([&] {
    need(query, "query");
    dlecc::GammaSearchOptions opt;
    opt.seed = seed;
    const auto r = dlecc::gamma_search(query->value, runs_per_gamma, queries, opt);
    if (gamma) *gamma = r.gamma;
    put_string(report_json, dlecc::gamma_search_to_json(r));
    if (out) *out = new dlecc_gl_result{r.result};
  });
}

size_t dlecc_gl_result_size(const dlecc_gl_result* result) { return result ? result->value.sets.size() : 0; }

dlecc_status dlecc_gl_result_set(const dlecc_gl_result* result, size_t i, size_t* variables, size_t capacity,
                                 size_t* count, double* weight) {
  return guard([&] {
    need(result, "result");
    dlecc::require(i < result->value.sets.size(), "set index out of range");
    const auto& s = result->value.sets[i];
    size_t c = 0;
    for (size_t b = 0; b < s.mask.size(); ++b)
      if (s.mask.test(b)) {
        if (variables && c < capacity) variables[c] = b + 1;
        ++c;
      }
    if (count) *count = c;
    if (weight) *weight = s.weight;
  });
}

uint64_t dlecc_gl_result_total_queries(const dlecc_gl_result* result) {
  return result ? result->value.total_queries : 0;
}

int dlecc_gl_result_same_sets(const dlecc_gl_result* a, const dlecc_gl_result* b) {
  return a && b && a->value.same_sets(b->value) ? 1 : 0;
}

dlecc_status dlecc_gl_result_to_json(const dlecc_gl_result* result, char** out) {
  return guard([&] {
    need(result, "result");
    need(out, "out");
    *out = copy_string(dlecc::gl_result_to_json(result->value));
  });
}

void dlecc_gl_result_free(dlecc_gl_result* result) { delete result; }

dlecc_status dlecc_gl_sweep_csv(const dlecc_query* query, double gamma, const uint64_t* query_grid,
                                size_t grid_size, size_t runs, uint64_t seed, char** csv) {
  return guard([&] {
    need(query, "query");
    need(query_grid, "query_grid");
    need(csv, "csv");
    const std::vector<uint64_t> grid(query_grid, query_grid + grid_size);
    *csv = copy_string(dlecc::sweep_to_csv(dlecc::query_convergence_sweep(query->value, gamma, grid, runs, seed)));
  });
}

// ------------------------------------------------------------------- codec

double dlecc_snr_db_to_sigma(double snr_db) { return dlecc::snr_db_to_sigma(snr_db); }

dlecc_status dlecc_encoder_from_tables(const dlecc_table* h1, const dlecc_table* h2, const dlecc_table* h3,
                                       dlecc_encoder** out) {
  return guard([&] {
    need(h1, "h1");
    need(h2, "h2");
    need(h3, "h3");
    need(out, "out");
    *out = new dlecc_encoder{dlecc::TurboEncoderParams(h1->value.arity(), {h1->value, h2->value, h3->value})};
  });
}

dlecc_status dlecc_encoder_from_json(const char* json, dlecc_encoder** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new dlecc_encoder{dlecc::encoder_from_json(json)};
  });
}

dlecc_status dlecc_encoder_to_json(const dlecc_encoder* encoder, char** out) {
  return guard([&] {
    need(encoder, "encoder");
    need(out, "out");
    *out = copy_string(dlecc::encoder_to_json(encoder->value));
  });
}

int dlecc_encoder_window(const dlecc_encoder* encoder) { return encoder ? encoder->value.window() : -1; }

dlecc_status dlecc_encoder_table(const dlecc_encoder* encoder, int stream, dlecc_table** out) {
  return guard([&] {
    need(encoder, "encoder");
    need(out, "out");
    dlecc::require(stream >= 0 && stream < 3, "stream must be 0, 1 or 2");
    *out = new dlecc_table{encoder->value.table(static_cast<size_t>(stream))};
  });
}

dlecc_status dlecc_analytic_power(const dlecc_encoder* encoder, size_t k, double* power) {
  return guard([&] {
    need(encoder, "encoder");
    need(power, "power");
    *power = dlecc::analytic_power(encoder->value, k);
  });
}

dlecc_status dlecc_constrain_power(const dlecc_encoder* encoder, size_t k, dlecc_encoder** out) {
  return guard([&] {
    need(encoder, "encoder");
    need(out, "out");
    *out = new dlecc_encoder{dlecc::constrain_power(encoder->value, k)};
  });
}

void dlecc_encoder_free(dlecc_encoder* encoder) { delete encoder; }

dlecc_status dlecc_interleaver_from_perm(const size_t* perm, size_t k, dlecc_interleaver** out) {
  return guard([&] {
    need(perm, "perm");
    need(out, "out");
    *out = new dlecc_interleaver{dlecc::Interleaver(std::vector<std::size_t>(perm, perm + k))};
  });
}

dlecc_status dlecc_interleaver_random(size_t k, uint64_t seed, dlecc_interleaver** out) {
  return guard([&] {
    need(out, "out");
    dlecc::Rng rng(seed);
    *out = new dlecc_interleaver{dlecc::Interleaver::random(k, rng)};
  });
}

dlecc_status dlecc_interleaver_from_json(const char* json, dlecc_interleaver** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new dlecc_interleaver{dlecc::interleaver_from_json(json)};
  });
}

dlecc_status dlecc_interleaver_to_json(const dlecc_interleaver* interleaver, char** out) {
  return guard([&] {
    need(interleaver, "interleaver");
    need(out, "out");
    *out = copy_string(dlecc::interleaver_to_json(interleaver->value));
  });
}

size_t dlecc_interleaver_size(const dlecc_interleaver* interleaver) {
  return interleaver ? interleaver->value.size() : 0;
}

void dlecc_interleaver_free(dlecc_interleaver* interleaver) { delete interleaver; }

namespace {

void check_codec_args(const dlecc_encoder* e, const dlecc_interleaver* il, size_t k) {
  need(e, "encoder");
  need(il, "interleaver");
  dlecc::require(il->value.size() == k, "interleaver length does not match k");
}

dlecc::Codeword to_codeword(const double* received, size_t k) {
  dlecc::Codeword c;
  for (size_t s = 0; s < 3; ++s) c.streams[s].assign(received + s * k, received + (s + 1) * k);
  return c;
}

}  // namespace

dlecc_status dlecc_encode(const dlecc_encoder* encoder, const dlecc_interleaver* interleaver, const uint8_t* bits,
                          size_t k, double* codeword) {
  return guard([&] {
    check_codec_args(encoder, interleaver, k);
    need(bits, "bits");
    need(codeword, "codeword");
    const auto c = dlecc::encode(encoder->value, {bits, k}, interleaver->value);
    for (size_t s = 0; s < 3; ++s) std::copy(c.streams[s].begin(), c.streams[s].end(), codeword + s * k);
  });
}

dlecc_status dlecc_turbo_decode(const dlecc_encoder* encoder, const dlecc_interleaver* interleaver,
                                const double* received, size_t k, double sigma, int iterations,
                                double* posteriors) {
  return guard([&] {
    check_codec_args(encoder, interleaver, k);
    need(received, "received");
    need(posteriors, "posteriors");
    const auto p = dlecc::turbo_decode(encoder->value, interleaver->value, to_codeword(received, k), sigma, iterations);
    std::copy(p.probs.begin(), p.probs.end(), posteriors);
  });
}

dlecc_status dlecc_brute_force_map(const dlecc_encoder* encoder, const dlecc_interleaver* interleaver,
                                   const double* received, size_t k, double sigma, double* posteriors) {
  return guard([&] {
    check_codec_args(encoder, interleaver, k);
    need(received, "received");
    need(posteriors, "posteriors");
    const auto p = dlecc::brute_force_map(encoder->value, interleaver->value, to_codeword(received, k), sigma);
    std::copy(p.probs.begin(), p.probs.end(), posteriors);
  });
}

// ----------------------------------------------------------------- metrics

dlecc_status dlecc_bce(const uint8_t* truth, const double* posteriors, size_t k, double* out) {
  return guard([&] {
    need(truth, "truth");
    need(posteriors, "posteriors");
    need(out, "out");
    *out = dlecc::bce({truth, k}, {posteriors, k});
  });
}

dlecc_status dlecc_ber(const uint8_t* truth, const double* posteriors, size_t k, double* out) {
  return guard([&] {
    need(truth, "truth");
    need(posteriors, "posteriors");
    need(out, "out");
    *out = dlecc::ber({truth, k}, {posteriors, k});
  });
}

dlecc_status dlecc_discrete_bce_ber(const char* channel_json, size_t symbol0, size_t symbol1, double* bce,
                                    double* ber) {
  return guard([&] {
    need(channel_json, "channel_json");
    const auto ch = dlecc::channel_from_json(channel_json);
    const auto v = dlecc::exact_discrete_bce_ber({symbol0, symbol1}, ch);
    if (bce) *bce = v.bce;
    if (ber) *ber = v.ber;
  });
}

dlecc_status dlecc_counterexample(char** csv, int* disjoint) {
  return guard([&] {
    const auto rep = dlecc::counterexample_sweep();
    put_string(csv, dlecc::counterexample_csv(rep));
    if (disjoint) *disjoint = rep.disjoint ? 1 : 0;
  });
}

dlecc_status dlecc_bounds(size_t points, char** csv, double* max_upper_gap, double* max_lower_gap) {
  return guard([&] {
    const auto rows = dlecc::tightness_sweep(points);
    double up = 0.0, lo = 0.0;
    for (const auto& r : rows) {
      up = std::max(up, r.upper_gap);
      lo = std::max(lo, r.lower_gap);
    }
    if (max_upper_gap) *max_upper_gap = up;
    if (max_lower_gap) *max_lower_gap = lo;
    put_string(csv, dlecc::tightness_csv(rows));
  });
}

// --------------------------------------------------------------- landscape

dlecc_status dlecc_theta_parity(const uint32_t masks[3], dlecc_theta** out) {
  return guard([&] {
    need(masks, "masks");
    need(out, "out");
    *out = new dlecc_theta{dlecc::parity_triple({masks[0], masks[1], masks[2]})};
  });
}

dlecc_status dlecc_theta_bent(dlecc_theta** out) {
  return guard([&] {
    need(out, "out");
    *out = new dlecc_theta{dlecc::bent_triple()};
  });
}

dlecc_status dlecc_theta_bent_partner(dlecc_theta** out) {
  return guard([&] {
    need(out, "out");
    *out = new dlecc_theta{dlecc::bent_partner_triple()};
  });
}

dlecc_status dlecc_theta_from_json(const char* json, dlecc_theta** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new dlecc_theta{dlecc::theta_from_json(json)};
  });
}

dlecc_status dlecc_theta_to_json(const dlecc_theta* theta, char** out) {
  return guard([&] {
    need(theta, "theta");
    need(out, "out");
    *out = copy_string(dlecc::theta_to_json(theta->value));
  });
}

void dlecc_theta_free(dlecc_theta* theta) { delete theta; }

void dlecc_loss_options_default(dlecc_loss_options* options) {
  if (!options) return;
  const dlecc::LossOptions d;
  *options = {d.k, d.snr_db, d.blocks, d.iterations, d.seed, d.threads};
}

dlecc_status dlecc_line_probe(const dlecc_theta* a, const dlecc_theta* b, const double* lambdas, size_t count,
                              const dlecc_loss_options* options, double* losses, double* std_errors,
                              int* degenerate, char** csv) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(lambdas, "lambdas");
    need(options, "options");
    const dlecc::LossOptions o{options->k, options->snr_db, options->blocks, options->iterations, options->seed,
                               options->threads};
    const auto r = dlecc::line_probe(a->value, b->value, std::vector<double>(lambdas, lambdas + count), o);
    for (size_t i = 0; i < count; ++i) {
      if (losses) losses[i] = r.losses[i];
      if (std_errors) std_errors[i] = r.std_errors[i];
      if (degenerate) degenerate[i] = r.degenerate[i] ? 1 : 0;
    }
    put_string(csv, dlecc::line_probe_to_csv(r));
  });
}

// ------------------------------------------------------------------- train

void dlecc_train_config_default(dlecc_train_config* cfg) {
  if (!cfg) return;
  const dlecc::TrainConfig d;
  *cfg = {d.k_enc,
          d.window,
          d.steps,
          d.batch_size,
          d.learning_rate,
          d.snr_db,
          d.seed,
          DLECC_INIT_NORMAL,
          d.snapshot_every,
          d.threads};
}

dlecc_status dlecc_train_encoder(const dlecc_train_config* cfg, dlecc_train_result** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    dlecc::require(cfg->init == DLECC_INIT_NORMAL || cfg->init == DLECC_INIT_PARITY, "unknown init kind");
    dlecc::TrainConfig c;
    c.k_enc = cfg->k_enc;
    c.window = cfg->window;
    c.steps = cfg->steps;
    c.batch_size = cfg->batch_size;
    c.learning_rate = cfg->learning_rate;
    c.snr_db = cfg->snr_db;
    c.seed = cfg->seed;
    c.init = cfg->init == DLECC_INIT_PARITY ? dlecc::InitKind::Parity : dlecc::InitKind::Normal;
    c.snapshot_every = cfg->snapshot_every;
    c.threads = cfg->threads;
    *out = new dlecc_train_result{dlecc::train_encoder(c)};
  });
}

dlecc_status dlecc_train_result_encoder(const dlecc_train_result* result, dlecc_encoder** out) {
  return guard([&] {
    need(result, "result");
    need(out, "out");
    *out = new dlecc_encoder{result->value.params};
  });
}

dlecc_status dlecc_train_result_fc_csv(const dlecc_train_result* result, char** csv) {
  return guard([&] {
    need(result, "result");
    need(csv, "csv");
    *csv = copy_string(dlecc::fc_evolution_csv(result->value.trace));
  });
}

dlecc_status dlecc_train_result_curve_csv(const dlecc_train_result* result, char** csv) {
  return guard([&] {
    need(result, "result");
    need(csv, "csv");
    *csv = copy_string(dlecc::learning_curve_csv(result->value.trace));
  });
}

const char* dlecc_train_result_aborted(const dlecc_train_result* result) {
  return result && result->value.aborted ? result->value.abort_reason.c_str() : nullptr;
}

void dlecc_train_result_free(dlecc_train_result* result) { delete result; }

dlecc_status dlecc_conditional_entropy(const dlecc_encoder* encoder, size_t k, double snr_db, size_t samples,
                                       uint64_t seed, unsigned threads, double* mean, double* std_error) {
  return guard([&] {
    need(encoder, "encoder");
    const auto e = dlecc::conditional_entropy(encoder->value, k, snr_db, samples, seed, threads);
    if (mean) *mean = e.mean;
    if (std_error) *std_error = e.std_error;
  });
}

void dlecc_eval_options_default(dlecc_eval_options* options) {
  if (!options) return;
  const dlecc::EvalOptions d;
  *options = {d.k_eval, d.blocks, d.iterations, d.seed, d.threads};
}

dlecc_status dlecc_evaluate(const dlecc_encoder* encoder, const double* snr_grid, size_t count,
                            const dlecc_eval_options* options, char** csv, dlecc_encoder** reprojected) {
  return guard([&] {
    need(encoder, "encoder");
    need(snr_grid, "snr_grid");
    need(options, "options");
    dlecc::EvalOptions o;
    o.k_eval = options->k_eval;
    o.snr_grid.assign(snr_grid, snr_grid + count);
    o.blocks = options->blocks;
    o.iterations = options->iterations;
    o.seed = options->seed;
    o.threads = options->threads;
    const auto rep = dlecc::evaluate_trained(encoder->value, o);
    put_string(csv, dlecc::eval_csv(rep));
    if (reprojected) *reprojected = new dlecc_encoder{rep.params};
  });
}

}  // extern "C"
