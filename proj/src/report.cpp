#include "mapcma/report.hpp"

#include <charconv>
#include <vector>

#include <fmt/format.h>

#include "mapcma/errors.hpp"

namespace mapcma
{
    namespace
    {
        constexpr std::string_view header = "function,dim,variant,r,lambda,trials,sr,sp1,mean_success_evals,seed";

        std::vector<std::string_view> split(std::string_view line)
        {
            std::vector<std::string_view> fields;
            std::size_t start = 0;
            while (true)
            {
                const auto comma = line.find(',', start);
                fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                    : comma - start));
                if (comma == std::string_view::npos)
                    return fields;
                start = comma + 1;
            }
        }

        template <class T>
        T number(std::string_view field, std::string_view column)
        {
            T value{};
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw InvalidConfig(fmt::format("summary CSV: bad {} value '{}'", column, field));
            return value;
        }

        std::optional<double> optional_number(std::string_view field, std::string_view column)
        {
            if (field == "-")
                return std::nullopt;
            return number<double>(field, column);
        }

        std::string optional_text(const std::optional<double>& v)
        {
            return v ? fmt::format("{:.1f}", *v) : std::string("-");
        }
    }

    std::string_view summary_csv_header() { return header; }

    SummaryRow make_summary_row(const ExperimentSpec& spec, const ExperimentSummary& summary)
    {
        const TrialConfig trial = spec.resolved_trial();
        SummaryRow row;
        row.function = std::string(function_name(trial.function));
        row.dim = trial.dim;
        row.variant = std::string(variant_name(trial.variant));
        row.r = trial.variant == Variant::MapCma && trial.r ? trial.r->to_string() : "-";
        row.lambda = trial.strategy().lambda;
        row.trials = summary.n_trials;
        row.sr = summary.success_rate;
        row.sp1 = summary.sp1;
        row.mean_success_evals = summary.mean_success_evals;
        row.seed = spec.base_seed;
        return row;
    }

    std::string format_summary_row(const SummaryRow& row)
    {
        return fmt::format("{},{},{},{},{},{},{:.4f},{},{},{}", row.function, row.dim, row.variant, row.r, row.lambda,
                           row.trials, row.sr, optional_text(row.sp1), optional_text(row.mean_success_evals),
                           row.seed);
    }

    SummaryRow parse_summary_row(std::string_view line)
    {
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
            line.remove_suffix(1);
        const auto fields = split(line);
        if (fields.size() != 10)
            throw InvalidConfig(fmt::format("summary CSV: expected 10 fields, got {}", fields.size()));
        SummaryRow row;
        row.function = std::string(fields[0]);
        row.dim = number<std::size_t>(fields[1], "dim");
        row.variant = std::string(fields[2]);
        row.r = std::string(fields[3]);
        row.lambda = number<std::size_t>(fields[4], "lambda");
        row.trials = number<std::size_t>(fields[5], "trials");
        row.sr = number<double>(fields[6], "sr");
        row.sp1 = optional_number(fields[7], "sp1");
        row.mean_success_evals = optional_number(fields[8], "mean_success_evals");
        row.seed = number<std::uint64_t>(fields[9], "seed");
        return row;
    }

    nlohmann::json traces_json(const ExperimentSpec& spec, const ExperimentSummary& summary)
    {
        const SummaryRow row = make_summary_row(spec, summary);
        nlohmann::json trials = nlohmann::json::array();
        for (const auto& t : summary.trials)
        {
            nlohmann::json trace = nlohmann::json::array();
            for (const auto& p : t.trace)
                trace.push_back({p.evaluations, p.best_f});
            trials.push_back({
                {"seed", t.seed},
                {"success", t.success},
                {"evaluations", t.evaluations},
                {"best_f", t.best_f},
                {"termination", termination_name(t.termination)},
                {"trace", std::move(trace)},
            });
        }
        return {
            {"function", row.function}, {"dim", row.dim},       {"variant", row.variant},
            {"r", row.r},               {"lambda", row.lambda}, {"trials", std::move(trials)},
        };
    }
}
