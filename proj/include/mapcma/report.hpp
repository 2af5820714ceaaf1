#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mapcma/config.hpp"
#include "mapcma/harness.hpp"

namespace mapcma
{
    /// One line of the summary CSV. Undefined SP1 (no successes) is written as "-".
    struct SummaryRow
    {
        std::string function;
        std::size_t dim = 0;
        std::string variant;
        std::string r = "-";
        std::size_t lambda = 0;
        std::size_t trials = 0;
        double sr = 0.0;
        std::optional<double> sp1;
        std::optional<double> mean_success_evals;
        std::uint64_t seed = 0;

        bool operator==(const SummaryRow&) const = default;
    };

    std::string_view summary_csv_header();
    SummaryRow make_summary_row(const ExperimentSpec& spec, const ExperimentSummary& summary);
    std::string format_summary_row(const SummaryRow& row);
    /// Throws InvalidConfig on a malformed line.
    SummaryRow parse_summary_row(std::string_view line);

    /// {"function": ..., "trials": [{"seed", "success", "evaluations", "best_f",
    /// "termination", "trace": [[evals, best_f], ...]}]}
    nlohmann::json traces_json(const ExperimentSpec& spec, const ExperimentSummary& summary);
}
