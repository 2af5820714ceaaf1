#include "mapcma/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace mapcma
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r");
            if (first == std::string_view::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r");
            return s.substr(first, last - first + 1);
        }

        // Drops a trailing '#' comment that is not inside a quoted string.
        std::string_view strip_comment(std::string_view s)
        {
            bool quoted = false;
            for (std::size_t i = 0; i < s.size(); ++i)
            {
                if (s[i] == '"')
                    quoted = !quoted;
                else if (s[i] == '#' && !quoted)
                    return s.substr(0, i);
            }
            return s;
        }

        std::string parse_scalar(std::string_view token, std::size_t line)
        {
            token = trim(token);
            if (token.empty())
                throw ConfigError(line, "empty value");
            if (token.front() == '"')
            {
                if (token.size() < 2 || token.back() != '"')
                    throw ConfigError(line, "unterminated string");
                const auto inner = token.substr(1, token.size() - 2);
                if (inner.find('"') != std::string_view::npos)
                    throw ConfigError(line, "unexpected quote inside string");
                return std::string(inner);
            }
            if (token.find_first_of(" \t\"[]") != std::string_view::npos)
                throw ConfigError(line, fmt::format("malformed value '{}'", token));
            return std::string(token);
        }

        bool valid_key(std::string_view key)
        {
            if (key.empty())
                return false;
            for (const char c : key)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
                    return false;
            return true;
        }

        template <class T>
        T parse_number(const FlatConfig::Entry& e, const std::string& key, const std::string& text)
        {
            T value{};
            const auto* end = text.data() + text.size();
            const auto [ptr, ec] = std::from_chars(text.data(), end, value);
            if (ec != std::errc() || ptr != end)
                throw ConfigError(e.line, fmt::format("'{}': cannot parse '{}' as a number", key, text));
            return value;
        }

        const std::string& scalar(const FlatConfig::Entry& e, const std::string& key)
        {
            if (e.is_array || e.values.size() != 1)
                throw ConfigError(e.line, fmt::format("'{}' must be a single value here", key));
            return e.values.front();
        }

        bool parse_bool(const FlatConfig::Entry& e, const std::string& key)
        {
            const std::string& v = scalar(e, key);
            if (v == "true")
                return true;
            if (v == "false")
                return false;
            throw ConfigError(e.line, fmt::format("'{}' must be true or false", key));
        }

        Function parse_function_value(const FlatConfig::Entry& e, const std::string& text)
        {
            const auto f = parse_function(text);
            if (!f)
                throw ConfigError(e.line, fmt::format("unknown function '{}'", text));
            return *f;
        }

        Variant parse_variant_value(const FlatConfig::Entry& e, const std::string& text)
        {
            const auto v = parse_variant(text);
            if (!v)
                throw ConfigError(e.line, fmt::format("unknown variant '{}'", text));
            return *v;
        }

        RSetting parse_r_value(const FlatConfig::Entry& e, const std::string& text)
        {
            const auto r = RSetting::parse(text);
            if (!r)
                throw ConfigError(e.line, fmt::format("invalid r '{}' (expected 1, sqrt-n, n or a positive number)", text));
            return *r;
        }

        const std::set<std::string> known_keys{
            "function", "dim", "variant", "r", "lambda", "trials", "seed", "target", "max-evals-factor", "h-sigma",
        };

        bool is_lambda_override(const std::string& key) { return key.rfind("lambda.", 0) == 0; }

        // Scalar keys shared by run and sweep; grid keys are handled by the caller.
        void apply_common(const FlatConfig& config, ExperimentSpec& spec)
        {
            for (const auto& [key, e] : config.entries())
            {
                if (key == "trials")
                {
                    spec.trials = parse_number<std::size_t>(e, key, scalar(e, key));
                    if (spec.trials == 0)
                        throw ConfigError(e.line, "'trials' must be >= 1");
                }
                else if (key == "seed")
                    spec.base_seed = parse_number<std::uint64_t>(e, key, scalar(e, key));
                else if (key == "target")
                {
                    spec.trial.target_f = parse_number<double>(e, key, scalar(e, key));
                    if (!(spec.trial.target_f > 0.0))
                        throw ConfigError(e.line, "'target' must be positive");
                }
                else if (key == "max-evals-factor")
                {
                    const auto factor = parse_number<std::uint64_t>(e, key, scalar(e, key));
                    if (factor == 0)
                        throw ConfigError(e.line, "'max-evals-factor' must be >= 1");
                    spec.max_evals_factor = factor;
                }
                else if (key == "h-sigma")
                    spec.trial.use_h_sigma = parse_bool(e, key);
                else if (key == "lambda")
                    spec.trial.lambda = parse_number<std::size_t>(e, key, scalar(e, key));
                else if (!known_keys.contains(key) && !is_lambda_override(key))
                    throw ConfigError(e.line, fmt::format("unknown key '{}'", key));
            }
        }

        std::optional<std::size_t> lambda_for_dim(const FlatConfig& config, std::size_t dim)
        {
            if (const auto* e = config.find(fmt::format("lambda.{}", dim)))
                return parse_number<std::size_t>(*e, "lambda", scalar(*e, "lambda"));
            if (const auto* e = config.find("lambda"))
                return parse_number<std::size_t>(*e, "lambda", scalar(*e, "lambda"));
            return std::nullopt;
        }

        void check_lambda_overrides(const FlatConfig& config)
        {
            for (const auto& [key, e] : config.entries())
                if (is_lambda_override(key))
                {
                    const std::string suffix = key.substr(7);
                    (void)parse_number<std::size_t>(e, key, suffix);
                    (void)parse_number<std::size_t>(e, key, scalar(e, key));
                }
        }
    }

    ConfigError::ConfigError(std::size_t line, const std::string& message, const std::string& source)
        : InvalidConfig(source.empty() ? fmt::format("line {}: {}", line, message)
                                       : fmt::format("{}: line {}: {}", source, line, message)),
          line_(line), detail_(message)
    {
    }

    TrialConfig ExperimentSpec::resolved_trial() const
    {
        TrialConfig t = trial;
        if (max_evals_factor)
            t.max_evals = *max_evals_factor * t.dim;
        return t;
    }

    FlatConfig FlatConfig::parse(std::string_view text)
    {
        FlatConfig config;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            const auto eol = text.find('\n', pos);
            const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++line_no;

            const auto line = trim(strip_comment(raw));
            if (line.empty())
                continue;
            if (line.front() == '[')
                throw ConfigError(line_no, "tables are not supported; use flat key = value pairs");
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError(line_no, "expected 'key = value'");
            const std::string key(trim(line.substr(0, eq)));
            if (!valid_key(key))
                throw ConfigError(line_no, fmt::format("invalid key '{}'", key));
            if (config.entries_.contains(key))
                throw ConfigError(line_no, fmt::format("duplicate key '{}'", key));

            Entry entry;
            entry.line = line_no;
            const auto value = trim(line.substr(eq + 1));
            if (!value.empty() && value.front() == '[')
            {
                if (value.back() != ']')
                    throw ConfigError(line_no, "unterminated array (arrays must fit on one line)");
                entry.is_array = true;
                const auto inner = trim(value.substr(1, value.size() - 2));
                std::size_t start = 0;
                while (!inner.empty() && start <= inner.size())
                {
                    const auto comma = inner.find(',', start);
                    const auto item = inner.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                          : comma - start);
                    if (trim(item).empty())
                    {
                        // Allow a single trailing comma.
                        if (comma == std::string_view::npos && !entry.values.empty())
                            break;
                        throw ConfigError(line_no, "empty array element");
                    }
                    entry.values.push_back(parse_scalar(item, line_no));
                    if (comma == std::string_view::npos)
                        break;
                    start = comma + 1;
                }
                if (entry.values.empty())
                    throw ConfigError(line_no, "empty array");
            }
            else
                entry.values.push_back(parse_scalar(value, line_no));
            config.entries_.emplace(key, std::move(entry));
        }
        return config;
    }

    FlatConfig FlatConfig::load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw InvalidConfig(fmt::format("cannot open config file '{}'", path.string()));
        std::ostringstream buffer;
        buffer << in.rdbuf();
        try
        {
            return parse(buffer.str());
        }
        catch (const ConfigError& e)
        {
            throw ConfigError(e.line(), e.detail(), path.string());
        }
    }

    const FlatConfig::Entry* FlatConfig::find(const std::string& key) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void apply_config(const FlatConfig& config, ExperimentSpec& spec)
    {
        if (const auto* e = config.find("function"))
            spec.trial.function = parse_function_value(*e, scalar(*e, "function"));
        if (const auto* e = config.find("dim"))
            spec.trial.dim = parse_number<std::size_t>(*e, "dim", scalar(*e, "dim"));
        if (const auto* e = config.find("variant"))
            spec.trial.variant = parse_variant_value(*e, scalar(*e, "variant"));
        if (const auto* e = config.find("r"))
            spec.trial.r = parse_r_value(*e, scalar(*e, "r"));
        check_lambda_overrides(config);
        apply_common(config, spec);
        if (config.find("lambda") == nullptr)
            if (auto l = lambda_for_dim(config, spec.trial.dim))
                spec.trial.lambda = l;
    }

    std::vector<ExperimentSpec> expand_sweep(const FlatConfig& config)
    {
        auto values_of = [&](const std::string& key) -> const FlatConfig::Entry& {
            const auto* e = config.find(key);
            if (!e)
                throw InvalidConfig(fmt::format("sweep config is missing '{}'", key));
            return *e;
        };
        const auto& functions = values_of("function");
        const auto& dims = values_of("dim");
        const auto& variants = values_of("variant");
        const FlatConfig::Entry* rs = config.find("r");
        check_lambda_overrides(config);

        ExperimentSpec base;
        apply_common(config, base);

        std::vector<ExperimentSpec> cells;
        for (const auto& fn_text : functions.values)
        {
            const Function fn = parse_function_value(functions, fn_text);
            for (const auto& dim_text : dims.values)
            {
                const auto dim = parse_number<std::size_t>(dims, "dim", dim_text);
                if (dim < 2)
                    throw ConfigError(dims.line, "'dim' values must be >= 2");
                for (const auto& variant_text : variants.values)
                {
                    const Variant variant = parse_variant_value(variants, variant_text);
                    std::vector<std::optional<RSetting>> r_values{std::nullopt};
                    if (variant == Variant::MapCma)
                    {
                        if (!rs)
                            throw ConfigError(variants.line, "variant map-cma needs an 'r' entry");
                        r_values.clear();
                        for (const auto& r_text : rs->values)
                            r_values.emplace_back(parse_r_value(*rs, r_text));
                    }
                    for (const auto& r : r_values)
                    {
                        ExperimentSpec cell = base;
                        cell.trial.function = fn;
                        cell.trial.dim = dim;
                        cell.trial.variant = variant;
                        cell.trial.r = r;
                        cell.trial.lambda = lambda_for_dim(config, dim);
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
        return cells;
    }
}
