#include "dser/report.hpp"

#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace dser {

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc;
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

nlohmann::json report_envelope(const std::string& command) {
    nlohmann::json j;
    j["schema"] = "dser-report/1";
    j["command"] = command;
    j["timestamp"] = iso_timestamp();
    return j;
}

nlohmann::json ring_to_report(const Ring& R) {
    if (R.is_rationals()) return "rationals";
    return "zmod:" + std::to_string(R.modulus);
}

nlohmann::json vec_to_report(const Vec& v) {
    nlohmann::json j = nlohmann::json::array();
    for (const Elem& e : v) j.push_back(ring_to_string(e));
    return j;
}

nlohmann::json mat_to_report(const Mat& M) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < M.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < M.cols; ++k) row.push_back(ring_to_string(M.at(i, k)));
        j.push_back(std::move(row));
    }
    return j;
}

nlohmann::json ptok_to_report(const PTok& tok) {
    nlohmann::json j;
    switch (tok.kind) {
        case PKind::EA: j["kind"] = "EA"; break;
        case PKind::EB: j["kind"] = "EB"; break;
        case PKind::MIX: j["kind"] = "MIX"; break;
        case PKind::UK: j["kind"] = "UK"; break;
        case PKind::USK: j["kind"] = "USK"; break;
    }
    j["s"] = tok.s;
    if (tok.kind == PKind::EA || tok.kind == PKind::EB) {
        j["w"] = vec_to_report(tok.w);
    } else {
        j["t"] = tok.t;
        j["c"] = ring_to_string(tok.c);
    }
    return j;
}

nlohmann::json pword_to_report(const PWord& w) {
    nlohmann::json j = nlohmann::json::array();
    for (const PTok& tok : w) j.push_back(ptok_to_report(tok));
    return j;
}

nlohmann::json tagged_word_to_report(const TaggedWord& w) {
    nlohmann::json j;
    switch (w.tag) {
        case WordTag::C: j["tag"] = "C"; break;
        case WordTag::D: j["tag"] = "D"; break;
        case WordTag::G: j["tag"] = "G"; break;
        case WordTag::F: j["tag"] = "F"; break;
    }
    j["tokens"] = pword_to_report(w.toks);
    if (w.tag == WordTag::F) j["f_prefix"] = w.f_prefix;
    return j;
}

nlohmann::json trace_to_report(const QuadSetup& S, const ReductionTrace& tr) {
    nlohmann::json j;
    j["rho1"] = pword_to_report(tr.r1);
    j["rho2"] = pword_to_report(tr.r2);
    j["rho3"] = pword_to_report(tr.l3);
    j["rho4"] = pword_to_report(tr.l4);
    j["residual"] = mat_to_report(tr.residual);
    j["residual_stabilized"] = is_stabilized(S, tr.residual);
    return j;
}

void write_report(const nlohmann::json& j, const std::string& out_path,
                  std::ostream& console) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        console << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

}  // namespace dser
