#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adopt/dates.hpp"

namespace adopt {

struct Observation {
    Date date;
    double cpc = 0.0;  // money per click, > 0
};

// Dated, strictly positive daily CPC observations for one keyword.
struct KeywordSeries {
    std::string keyword_id;
    std::vector<Observation> observations;  // dates strictly increasing
};

struct LogReturn {
    Date date;  // date of the later observation
    double y = 0.0;
};

// Daily log change rates y(k) = ln cpc(k) - ln cpc(k-1).
struct LogReturnSeries {
    std::string keyword_id;
    std::vector<LogReturn> returns;
};

enum class WindowRole { training, development, test };

struct DataWindow {
    WindowRole role = WindowRole::training;
    Date start;
    Date end;  // inclusive

    int n_days() const { return static_cast<int>(end.serial - start.serial) + 1; }
    void validate() const;
};

struct RejectedSeries {
    std::string keyword_id;
    std::string reason;
};

struct LoadResult {
    std::vector<KeywordSeries> series;
    std::vector<RejectedSeries> rejected;
};

// Loads the CSV `keyword,date,cpc` and keeps only series that fully cover the
// window with all-positive CPCs. Rejections are reported per keyword.
LoadResult load_series(const std::filesystem::path& path, const DataWindow& window);

LogReturnSeries log_returns(const KeywordSeries& series);

void write_rejection_report(const std::filesystem::path& path,
                            const std::vector<RejectedSeries>& rejected);

}  // namespace adopt
