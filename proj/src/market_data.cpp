#include "adopt/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace adopt {

void DataWindow::validate() const {
    if (!(start < end)) throw std::invalid_argument("window start must precede end");
    if (n_days() < 8) throw std::invalid_argument("window must contain at least 8 observations");
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

LoadResult load_series(const std::filesystem::path& path, const DataWindow& window) {
    window.validate();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "keyword,date,cpc")
        throw std::runtime_error("bad header in " + path.string() + ": '" + line + "'");

    // keyword -> date serial -> cpc; map keeps first-seen keyword order separately
    std::map<std::string, std::map<std::int64_t, double>> rows;
    std::vector<std::string> order;
    std::map<std::string, bool> has_duplicate;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_row(line);
        if (fields.size() != 3)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 3 fields");
        const std::string& kw = fields[0];
        Date date;
        double cpc;
        try {
            date = Date::parse(fields[1]);
            std::size_t pos = 0;
            cpc = std::stod(fields[2], &pos);
            if (pos != fields[2].size() || !std::isfinite(cpc)) throw std::invalid_argument("cpc");
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": malformed row '" + line + "'");
        }
        if (date < window.start || window.end < date) continue;
        auto [it, inserted] = rows.try_emplace(kw);
        if (inserted) order.push_back(kw);
        if (!it->second.emplace(date.serial, cpc).second) has_duplicate[kw] = true;
    }

    LoadResult result;
    for (const auto& kw : order) {
        const auto& by_date = rows.at(kw);
        if (has_duplicate.count(kw)) {
            result.rejected.push_back({kw, "duplicate date"});
            continue;
        }
        const bool any_nonpositive =
            std::any_of(by_date.begin(), by_date.end(), [](const auto& p) { return p.second <= 0.0; });
        if (any_nonpositive) {
            result.rejected.push_back({kw, "zero CPC"});
            continue;
        }
        if (static_cast<int>(by_date.size()) != window.n_days()) {
            result.rejected.push_back({kw, "gap"});
            continue;
        }
        KeywordSeries series;
        series.keyword_id = kw;
        series.observations.reserve(by_date.size());
        for (const auto& [serial, cpc] : by_date) series.observations.push_back({Date{serial}, cpc});
        result.series.push_back(std::move(series));
    }
    return result;
}

LogReturnSeries log_returns(const KeywordSeries& series) {
    if (series.observations.size() < 2)
        throw std::invalid_argument("series '" + series.keyword_id + "' too short for log returns");
    LogReturnSeries out;
    out.keyword_id = series.keyword_id;
    out.returns.reserve(series.observations.size() - 1);
    for (std::size_t k = 1; k < series.observations.size(); ++k) {
        const auto& prev = series.observations[k - 1];
        const auto& cur = series.observations[k];
        out.returns.push_back({cur.date, std::log(cur.cpc) - std::log(prev.cpc)});
    }
    return out;
}

void write_rejection_report(const std::filesystem::path& path,
                            const std::vector<RejectedSeries>& rejected) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "keyword,reason\n";
    for (const auto& r : rejected) out << r.keyword_id << ',' << r.reason << '\n';
}

}  // namespace adopt
