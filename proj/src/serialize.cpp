#include "dlecc/serialize.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "dlecc/error.hpp"
#include "csv.hpp"

namespace dlecc {

using detail::Num;
namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) fail(ErrorKind::Parse, std::string("missing field \"") + name + "\"");
  return j.at(name);
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::Parse, std::string(what) + " must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorKind::Parse, std::string(what) + " must contain only numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

int arity_field(const json& j, const char* name) {
  const json& a = field(j, name);
  if (!a.is_number_integer()) fail(ErrorKind::Parse, std::string(name) + " must be an integer");
  return a.get<int>();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json gl_json(const GLResult& r) {
  json sets = json::array();
  for (const auto& s : r.sets) {
    json vars = json::array();
    for (std::size_t i = 0; i < s.mask.size(); ++i)
      if (s.mask.test(i)) vars.push_back(i + 1);
    sets.push_back({{"mask", s.mask.to_hex()}, {"variables", vars}, {"weight", s.weight}});
  }
  return {{"sets", sets}, {"total_queries", r.total_queries}, {"stable", r.stable}};
}

}  // namespace

PseudoBooleanTable table_from_json(const std::string& text) {
  const json j = parse(text);
  return PseudoBooleanTable(arity_field(j, "arity"), numbers(field(j, "values"), "values"));
}

std::string table_to_json(const PseudoBooleanTable& table) {
  return dump({{"arity", table.arity()}, {"values", table.values()}});
}

FourierSpectrum spectrum_from_json(const std::string& text) {
  const json j = parse(text);
  return FourierSpectrum(arity_field(j, "arity"), numbers(field(j, "coeffs"), "coeffs"));
}

std::string spectrum_to_json(const FourierSpectrum& spectrum) {
  return dump({{"arity", spectrum.arity()}, {"coeffs", spectrum.coeffs()}});
}

TurboEncoderParams encoder_from_json(const std::string& text) {
  const json j = parse(text);
  const int w = arity_field(j, "window");
  const json& t = field(j, "tables");
  if (!t.is_array() || t.size() != 3) fail(ErrorKind::Parse, "tables must be an array of three arrays");
  return TurboEncoderParams(w, {PseudoBooleanTable(w, numbers(t[0], "tables[0]")),
                                PseudoBooleanTable(w, numbers(t[1], "tables[1]")),
                                PseudoBooleanTable(w, numbers(t[2], "tables[2]"))});
}

std::string encoder_to_json(const TurboEncoderParams& params) {
  json tables = json::array();
  for (const auto& t : params.tables()) tables.push_back(t.values());
  return dump({{"window", params.window()}, {"tables", tables}});
}

Interleaver interleaver_from_json(const std::string& text) {
  const json j = parse(text);
  const json& p = field(j, "perm");
  if (!p.is_array()) fail(ErrorKind::Parse, "perm must be an array");
  std::vector<std::size_t> perm;
  for (const auto& x : p) {
    if (!x.is_number_unsigned()) fail(ErrorKind::Parse, "perm must contain non-negative integers");
    perm.push_back(x.get<std::size_t>());
  }
  return Interleaver(std::move(perm));
}

std::string interleaver_to_json(const Interleaver& interleaver) { return dump({{"perm", interleaver.perm()}}); }

DiscreteChannel channel_from_json(const std::string& text) {
  const json j = parse(text);
  const json& t = field(j, "transition");
  if (!t.is_array()) fail(ErrorKind::Parse, "transition must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : t) rows.push_back(numbers(r, "transition row"));
  double tol = 1e-12;
  if (j.contains("column_tolerance")) {
    if (!j["column_tolerance"].is_number()) fail(ErrorKind::Parse, "column_tolerance must be a number");
    tol = j["column_tolerance"].get<double>();
  }
  return DiscreteChannel(std::move(rows), tol);
}

std::string channel_to_json(const DiscreteChannel& channel) {
  return dump({{"transition", channel.transition()}, {"column_tolerance", channel.column_tolerance()}});
}

ThetaTriple theta_from_json(const std::string& text) {
  const json j = parse(text);
  const int a = arity_field(j, "arity");
  const json& s = field(j, "spectra");
  if (!s.is_array() || s.size() != 3) fail(ErrorKind::Parse, "spectra must be an array of three arrays");
  ThetaTriple t;
  for (std::size_t b = 0; b < 3; ++b) t.spectra[b] = FourierSpectrum(a, numbers(s[b], "spectra"));
  return t;
}

std::string theta_to_json(const ThetaTriple& theta) {
  json spectra = json::array();
  for (const auto& s : theta.spectra) spectra.push_back(s.coeffs());
  return dump({{"arity", theta.spectra[0].arity()}, {"spectra", spectra}});
}

std::string gl_result_to_json(const GLResult& result) { return dump(gl_json(result)); }

std::string gamma_search_to_json(const GammaSearchResult& search) {
  json trials = json::array();
  for (const auto& t : search.trials)
    trials.push_back({{"gamma", t.gamma}, {"stable", t.stable}, {"flagged", t.flagged}, {"sets", t.sets}});
  return dump({{"gamma", search.gamma}, {"result", gl_json(search.result)}, {"trials", trials}});
}

std::string variables_of(SubsetMask mask) {
  std::string out;
  for (int i = 0; i < 32; ++i)
    if ((mask >> i) & 1u) {
      if (!out.empty()) out += ' ';
      out += std::to_string(i + 1);
    }
  return out;
}

std::string energy_csv(const FourierSpectrum& spectrum, const std::vector<EnergyEntry>& profile) {
  std::ostringstream os;
  os << "subset_mask,variables,coefficient,weight,cumulative_fraction\n";
  const double total = spectrum.energy();
  double acc = 0.0;
  for (const auto& e : profile) {
    acc += e.weight;
    os << e.mask << ',' << variables_of(e.mask) << ',' << Num{spectrum[e.mask]} << ',' << Num{e.weight} << ','
       << Num{acc / total} << '\n';
  }
  return os.str();
}

std::string counterexample_csv(const CounterexampleReport& report) {
  std::ostringstream os;
  os << "f,ber,bce,ber_argmin,bce_argmin\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    auto in = [&](const std::vector<std::size_t>& v) { return std::find(v.begin(), v.end(), i) != v.end(); };
    os << "\"[" << r.f.symbol_of_zero + 1 << ',' << r.f.symbol_of_one + 1 << "]\"," << Num{r.ber} << ',' << Num{r.bce} << ','
       << in(report.ber_argmin) << ',' << in(report.bce_argmin) << '\n';
  }
  return os.str();
}

std::string tightness_csv(const std::vector<TightnessRow>& rows) {
  std::ostringstream os;
  os << "t,upper_ber,upper_bce,upper_gap,lower_ber,lower_bce,lower_gap\n";
  for (const auto& r : rows)
    os << Num{r.t} << ',' << Num{r.upper_ber} << ',' << Num{r.upper_bce} << ',' << Num{r.upper_gap} << ','
       << Num{r.lower_ber} << ',' << Num{r.lower_bce} << ',' << Num{r.lower_gap} << '\n';
  return os.str();
}

}  // namespace dlecc
