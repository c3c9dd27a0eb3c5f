#include "res/core/errors.hpp"
#include "res/reasoner/reasoner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace res::reasoner {

namespace {

struct Token {
    std::string text;   // original casing
    std::string lower;
    bool separator = false;  // comma or similar phrase break
    bool removed = false;
};

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80 || c == '-' || c == '+' || c == '#' || c == '&' ||
           c == '\'' || c == '.' || c == '_';
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c == ',' || c == ';') {
            out.push_back({std::string(1, static_cast<char>(c)), std::string(1, static_cast<char>(c)), true});
            ++i;
            continue;
        }
        if (!is_word_byte(c)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        std::string word(text.substr(i, j - i));
        // Sentence punctuation and possessives cling to words; drop them.
        while (!word.empty() && (word.back() == '.' || word.back() == '\'' || word.back() == '-')) {
            word.pop_back();
        }
        while (!word.empty() && (word.front() == '\'' || word.front() == '-' || word.front() == '.')) {
            word.erase(word.begin());
        }
        if (!word.empty()) out.push_back({word, to_lower_ascii(word), false});
        i = j;
    }
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::optional<int> as_year(std::string_view s) {
    if (s.size() != 4 || !all_digits(s)) return std::nullopt;
    const int y = std::stoi(std::string(s));
    if (y < kMinYear || y > current_utc_year() + 1) return std::nullopt;
    return y;
}

// "2015-2024" or "2015–2024" (en dash).
std::optional<std::pair<int, int>> as_year_span(std::string_view s) {
    for (std::string_view dash : {std::string_view("-"), std::string_view("\xE2\x80\x93")}) {
        const auto pos = s.find(dash);
        if (pos == std::string_view::npos) continue;
        auto a = as_year(s.substr(0, pos));
        auto b = as_year(s.substr(pos + dash.size()));
        if (a && b) return std::pair{*a, *b};
    }
    return std::nullopt;
}

const std::set<std::string, std::less<>>& edge_fillers() {
    static const std::set<std::string, std::less<>> words = {
        "how", "has", "have", "had", "many", "much", "what", "what's", "which", "who", "is", "are",
        "was", "were", "be", "been", "being", "the", "a", "an", "of", "on", "in", "about", "for",
        "to", "regarding", "related", "show", "me", "give", "tell", "list", "find", "number",
        "count", "total", "articles", "article", "papers", "paper", "publications", "publication",
        "research", "studies", "study", "published", "publishing", "publish", "publishes", "did",
        "does", "do", "there", "grown", "grow", "grows", "growing", "growth", "trend", "trends",
        "trending", "changed", "change", "changes", "evolved", "evolve", "over", "time", "per",
        "year", "years", "yearly", "annually", "by", "overall", "statistics", "stats", "literature",
        "field", "output", "volume", "activity", "i", "we", "can", "you", "please", "into",
        "within", "across", "all", "from", "since", "between", "during", "until", "through", "with",
        "get", "see", "compare", "comparison", "compared", "comparing", "works", "scholarly",
        "academic", "scientific", "topic", "area", "subject", "and", "or", "vs", "versus", "against",
        "so", "far", "recent", "recently", "lately", "up", "out", "let", "us", "s", "developed",
        "develop", "developing", "discuss", "discusses", "discussing", "mention", "mentions",
        "overview", "summary", "describe", "covering", "cover", "covers",
    };
    return words;
}

const std::set<std::string, std::less<>>& ranking_fillers() {
    static const std::set<std::string, std::less<>> words = {
        "top", "most", "leading", "journals", "journal", "venues", "venue", "publishers",
        "publisher", "types", "type", "sources", "source", "outlets", "outlet", "rank", "ranking",
        "ranked", "biggest", "largest", "prolific", "active", "best", "work",
    };
    return words;
}

bool is_comparator(std::string_view w) {
    return w == "vs" || w == "versus" || w == "and" || w == "against" || w == "with" || w == "or";
}

std::string edge_strip(const std::vector<const Token*>& words, Intent intent) {
    std::size_t b = 0, e = words.size();
    const auto filler = [&](const Token* t) {
        if (edge_fillers().contains(t->lower)) return true;
        if (intent == Intent::Ranking && ranking_fillers().contains(t->lower)) return true;
        return false;
    };
    while (b < e && filler(words[b])) ++b;
    while (e > b && filler(words[e - 1])) --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        if (!out.empty()) out += ' ';
        out += words[i]->text;
    }
    return out;
}

bool has_word(const std::vector<Token>& tokens, std::initializer_list<std::string_view> words) {
    return std::any_of(tokens.begin(), tokens.end(), [&](const Token& t) {
        return std::find(words.begin(), words.end(), t.lower) != words.end();
    });
}

bool has_phrase(const std::vector<Token>& tokens, std::string_view first, std::string_view second) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].lower == first && tokens[i + 1].lower == second) return true;
    }
    return false;
}

}  // namespace

YearRange default_trend_range() {
    const int year = current_utc_year();
    return {year - 10, year - 1};
}

QueryPlan rule_based_parse(const UserQuery& query) {
    auto tokens = tokenize(query.text());

    // Years and the connector words that bind them.
    std::vector<int> years;
    bool since = false;
    bool ranged = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto& t = tokens[i];
        if (auto span = as_year_span(t.lower)) {
            years.push_back(span->first);
            years.push_back(span->second);
            t.removed = true;
            ranged = true;
        } else if (auto y = as_year(t.lower)) {
            years.push_back(*y);
            t.removed = true;
        } else {
            continue;
        }
        if (i > 0) {
            auto& prev = tokens[i - 1];
            static const std::set<std::string, std::less<>> before = {
                "from", "between", "since", "in", "during", "after", "to", "until", "through", "and", "till"};
            if (before.contains(prev.lower)) {
                if (prev.lower == "since" || prev.lower == "after") since = true;
                if (prev.lower == "to" || prev.lower == "until" || prev.lower == "through" ||
                    prev.lower == "and" || prev.lower == "till") {
                    if (i >= 2 && tokens[i - 2].removed) ranged = true;
                }
                prev.removed = true;
            }
        }
    }

    std::optional<YearRange> range;
    if (!years.empty()) {
        const auto [lo, hi] = std::minmax_element(years.begin(), years.end());
        if (years.size() == 1 && since) {
            range = YearRange{*lo, current_utc_year()};
        } else {
            range = YearRange{*lo, *hi};
        }
        if (years.size() >= 2 && *lo != *hi) ranged = true;
    }

    QueryPlan plan;
    const bool comparison = has_word(tokens, {"compare", "compared", "comparing", "comparison", "vs", "versus"});
    const bool ranking = has_word(tokens, {"top", "most", "leading"});
    const bool trend = std::any_of(tokens.begin(), tokens.end(),
                                   [](const Token& t) {
                                       return t.lower.starts_with("trend") || t.lower.starts_with("grow");
                                   }) ||
                       has_phrase(tokens, "over", "time") || has_phrase(tokens, "per", "year") || ranged;

    if (comparison) {
        plan.intent = Intent::Comparison;
    } else if (ranking) {
        plan.intent = Intent::Ranking;
    } else if (trend) {
        plan.intent = Intent::Trend;
    } else {
        plan.intent = Intent::Statistics;
    }

    if (plan.intent == Intent::Ranking) {
        int n = 10;
        for (auto& t : tokens) {
            if (t.removed || !all_digits(t.lower) || t.lower.size() > 2) continue;
            const int v = std::stoi(t.lower);
            if (v >= 1 && v <= kMaxTopN) {
                n = v;
                t.removed = true;
                break;
            }
        }
        plan.top_n = n;
        plan.rank_dimension = RankDimension::Venue;
        for (const auto& t : tokens) {
            if (t.lower == "journal" || t.lower == "journals" || t.lower == "venue" || t.lower == "venues") {
                plan.rank_dimension = RankDimension::Venue;
                break;
            }
            if (t.lower == "publisher" || t.lower == "publishers") {
                plan.rank_dimension = RankDimension::Publisher;
                break;
            }
            if (t.lower == "type" || t.lower == "types") {
                plan.rank_dimension = RankDimension::WorkType;
                break;
            }
        }
    }

    // "over time" / "per year" are trend markers, not subject words.
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if ((tokens[i].lower == "over" && tokens[i + 1].lower == "time") ||
            (tokens[i].lower == "per" && tokens[i + 1].lower == "year")) {
            tokens[i].removed = tokens[i + 1].removed = true;
        }
    }

    std::vector<std::vector<const Token*>> parts(1);
    for (const auto& t : tokens) {
        if (t.removed) {
            // A removed token in the middle of a phrase still breaks it.
            if (!parts.back().empty()) parts.emplace_back();
            continue;
        }
        const bool split = t.separator || (plan.intent == Intent::Comparison && is_comparator(t.lower));
        if (split) {
            if (!parts.back().empty()) parts.emplace_back();
            continue;
        }
        if (plan.intent == Intent::Comparison &&
            (t.lower == "compare" || t.lower == "compared" || t.lower == "comparing" || t.lower == "comparison")) {
            if (!parts.back().empty()) parts.emplace_back();
            continue;
        }
        parts.back().push_back(&t);
    }

    for (const auto& part : parts) {
        auto subject = edge_strip(part, plan.intent);
        if (!subject.empty()) plan.subjects.push_back(std::move(subject));
    }
    // Outside comparisons one subject is expected: keep the longest phrase.
    if (plan.intent != Intent::Comparison && plan.subjects.size() > 1) {
        auto best = std::max_element(plan.subjects.begin(), plan.subjects.end(),
                                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
        plan.subjects = {*best};
    }
    if (plan.subjects.empty()) fail(ErrorKind::PlanInvalid, "no subject could be extracted from the query");

    plan.time_range = range;
    if (plan.intent == Intent::Trend && !plan.time_range) plan.time_range = default_trend_range();
    validate_plan(plan);
    return plan;
}

}  // namespace res::reasoner
