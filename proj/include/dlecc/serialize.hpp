#pragma once

#include <string>
#include <vector>

#include "dlecc/boolfn.hpp"
#include "dlecc/channel.hpp"
#include "dlecc/codec.hpp"
#include "dlecc/goldreich_levin.hpp"
#include "dlecc/landscape.hpp"
#include "dlecc/metrics.hpp"
#include "dlecc/train.hpp"

// JSON and CSV text formats. Parsers throw Error(Parse) on malformed input
// and Error(InvalidArgument) on well-formed but invalid content.
//
//   table        {"arity": w, "values": [2^w numbers]}
//   spectrum     {"arity": w, "coeffs": [2^w numbers]}
//   encoder      {"window": w, "tables": [[...], [...], [...]]}
//   interleaver  {"perm": [...]}
//   channel      {"transition": [[...] per output], "column_tolerance": t}
//   theta        {"arity": 5, "spectra": [[...], [...], [...]]}
namespace dlecc {

PseudoBooleanTable table_from_json(const std::string& text);
std::string table_to_json(const PseudoBooleanTable& table);

FourierSpectrum spectrum_from_json(const std::string& text);
std::string spectrum_to_json(const FourierSpectrum& spectrum);

TurboEncoderParams encoder_from_json(const std::string& text);
std::string encoder_to_json(const TurboEncoderParams& params);

Interleaver interleaver_from_json(const std::string& text);
std::string interleaver_to_json(const Interleaver& interleaver);

DiscreteChannel channel_from_json(const std::string& text);
std::string channel_to_json(const DiscreteChannel& channel);

ThetaTriple theta_from_json(const std::string& text);
std::string theta_to_json(const ThetaTriple& theta);

/// mask (hex and 1-based index list), weight, total_queries, stable.
std::string gl_result_to_json(const GLResult& result);
std::string gamma_search_to_json(const GammaSearchResult& search);

/// subset_mask,variables,coefficient,weight,cumulative_fraction.
std::string energy_csv(const FourierSpectrum& spectrum, const std::vector<EnergyEntry>& profile);

/// f,ber,bce with f printed as 1-based "[a,b]".
std::string counterexample_csv(const CounterexampleReport& report);
std::string tightness_csv(const std::vector<TightnessRow>& rows);

/// "1 3 4" style listing of the variables in a mask, 1-based.
std::string variables_of(SubsetMask mask);

}  // namespace dlecc
