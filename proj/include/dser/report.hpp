#ifndef DSER_REPORT_HPP
#define DSER_REPORT_HPP

#include <iosfwd>
#include <string>

#include "dser/fdg.hpp"
#include "dser/normalizer.hpp"
#include "json.hpp"

namespace dser {

// Every CLI report is a JSON object with a fixed envelope:
//   schema     "dser-report/1"
//   command    the subcommand that produced it
//   timestamp  wall-clock time (the only field allowed to vary between
//              identically seeded runs)
// Ring elements are serialized as strings so that rationals and residue
// classes print exactly.
nlohmann::json report_envelope(const std::string& command);

std::string iso_timestamp();

nlohmann::json ring_to_report(const Ring& R);
nlohmann::json vec_to_report(const Vec& v);
nlohmann::json mat_to_report(const Mat& M);
nlohmann::json ptok_to_report(const PTok& tok);
nlohmann::json pword_to_report(const PWord& w);
nlohmann::json tagged_word_to_report(const TaggedWord& w);
nlohmann::json trace_to_report(const QuadSetup& S, const ReductionTrace& tr);

// Serialize with a stable 2-space indentation and a trailing newline, to
// "-" (stdout) or a file path.
void write_report(const nlohmann::json& j, const std::string& out_path,
                  std::ostream& console);

}  // namespace dser

#endif
