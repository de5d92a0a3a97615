#include "confmap/perception.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace confmap {

CategoryDistribution CategoryDistribution::uniform(std::size_t n) {
    return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

CategoryDistribution CategoryDistribution::normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("distribution weights must be finite and non-negative");
        sum += w;
    }
    if (!(sum > 0.0)) throw ArgumentError("distribution weights sum to zero");
    for (double& w : weights) w /= sum;
    return {std::move(weights)};
}

CategoryDistribution CategoryDistribution::from_log(std::span<const double> log_weights) {
    const double mx = *std::max_element(log_weights.begin(), log_weights.end());
    if (!std::isfinite(mx)) throw ArgumentError("log-weights have no finite maximum");
    std::vector<double> p(log_weights.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] = std::exp(log_weights[i] - mx);
    for (double& v : p) v /= sum;
    return {std::move(p)};
}

bool CategoryDistribution::valid(double tol) const {
    if (probs.empty()) return false;
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

Label CategoryDistribution::argmax() const {
    return static_cast<Label>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

AppearanceModel AppearanceModel::identity(std::size_t n) {
    AppearanceModel m;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(n, 0.0);
        row[i] = 1.0;
        m.confusion.push_back({std::move(row)});
    }
    return m;
}

void AppearanceModel::validate(std::size_t n_categories) const {
    if (confusion.size() != n_categories) throw InvariantError("confusion matrix must have one row per category");
    for (std::size_t i = 0; i < confusion.size(); ++i) {
        if (confusion[i].size() != n_categories) throw InvariantError("confusion matrix must be square");
        if (!confusion[i].valid()) throw InvariantError("confusion row " + std::to_string(i) + " is not a distribution");
    }
    if (concentration && !(*concentration > 0.0)) throw InvariantError("concentration must be positive");
}

namespace {

std::string read_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Each element: (line number, tokens). Blank and "//" lines dropped.
std::vector<std::pair<int, std::vector<std::string>>> tokenized_lines(const std::string& text) {
    std::vector<std::pair<int, std::vector<std::string>>> out;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto t = trim(line);
        if (t.empty() || t.starts_with("//")) continue;
        std::istringstream ls{std::string(t)};
        std::vector<std::string> tk;
        std::string s;
        while (ls >> s) tk.push_back(s);
        out.emplace_back(no, std::move(tk));
    }
    return out;
}

double parse_prob(const std::string& s, int line) {
    double v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError("invalid number '" + s + "'", line);
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("probability '" + s + "' outside [0,1]", line);
    return v;
}

Label parse_category(const CategorySet& cats, const std::string& s, int line) {
    const Label l = cats.find(s);
    if (l == kUnknownLabel) throw ParseError("unknown place category '" + s + "'", line);
    return l;
}

// Accepts a distribution whose sum is within 1e-6 of one and renormalizes
// it so the stored vector meets the 1e-9 invariant.
CategoryDistribution checked_distribution(std::vector<double> p, const std::string& what) {
    double sum = 0.0;
    for (double v : p) sum += v;
    if (std::abs(sum - 1.0) > 1e-6) throw InvariantError(what + " sums to " + format_double(sum) + ", expected 1");
    return CategoryDistribution::normalized(std::move(p));
}

}  // namespace

AppearanceModel parse_appearance_model(const std::string& text, const CategorySet& categories) {
    const std::size_t n = categories.size();
    AppearanceModel m = AppearanceModel::identity(n);
    m.concentration.reset();
    for (const auto& [ln, tk] : tokenized_lines(text)) {
        if (tk[0] == "concentration") {
            if (tk.size() != 2) throw ParseError("expected 'concentration <k|deterministic>'", ln);
            if (tk[1] == "deterministic") {
                m.concentration.reset();
            } else {
                double k{};
                const auto res = std::from_chars(tk[1].data(), tk[1].data() + tk[1].size(), k);
                if (res.ec != std::errc{} || !(k > 0.0)) throw ParseError("concentration must be positive", ln);
                m.concentration = k;
            }
        } else if (tk[0] == "row") {
            if (tk.size() != n + 2) throw ParseError("row needs a category and " + std::to_string(n) + " values", ln);
            const Label t = parse_category(categories, tk[1], ln);
            std::vector<double> row;
            for (std::size_t i = 0; i < n; ++i) row.push_back(parse_prob(tk[i + 2], ln));
            m.confusion[static_cast<std::size_t>(t)] = checked_distribution(std::move(row), "confusion row '" + tk[1] + "'");
        } else {
            throw ParseError("unknown directive '" + tk[0] + "'", ln);
        }
    }
    m.validate(n);
    return m;
}

AppearanceModel load_appearance_model(const std::filesystem::path& path, const CategorySet& categories) {
    return parse_appearance_model(read_file(path, "appearance model"), categories);
}

double ObjectDetectorModel::probability(const std::string& category) const {
    const auto it = p_detect.find(category);
    return it == p_detect.end() ? default_p : it->second;
}

void ObjectDetectorModel::validate() const {
    if (!(default_p >= 0.0 && default_p <= 1.0)) throw InvariantError("default detection probability outside [0,1]");
    for (const auto& [k, p] : p_detect)
        if (!(p >= 0.0 && p <= 1.0)) throw InvariantError("detection probability for '" + k + "' outside [0,1]");
}

CooccurrenceTable::CooccurrenceTable(CategorySet categories, std::vector<std::string> objects,
                                     std::vector<std::vector<double>> likelihood, CategoryDistribution prior)
    : categories_(std::move(categories)),
      objects_(std::move(objects)),
      likelihood_(std::move(likelihood)),
      prior_(std::move(prior)) {
    if (likelihood_.size() != objects_.size()) throw InvariantError("likelihood table needs one row per object");
    if (prior_.size() != categories_.size() || !prior_.valid()) throw InvariantError("place prior is not a distribution");
    std::set<std::string> seen;
    for (std::size_t o = 0; o < objects_.size(); ++o) {
        if (!seen.insert(objects_[o]).second) throw InvariantError("duplicate object category '" + objects_[o] + "'");
        if (likelihood_[o].size() != categories_.size()) throw InvariantError("likelihood row has wrong width");
        for (double& p : likelihood_[o]) {
            if (!(p >= 0.0 && p <= 1.0)) throw InvariantError("likelihood outside [0,1] for '" + objects_[o] + "'");
            p = std::clamp(p, kLikelihoodFloor, kLikelihoodCap);
        }
    }
}

int CooccurrenceTable::find_object(const std::string& name) const {
    const auto it = std::find(objects_.begin(), objects_.end(), name);
    return it == objects_.end() ? -1 : static_cast<int>(it - objects_.begin());
}

CooccurrenceTable parse_cooccurrence(const std::string& text, const CategorySet& categories) {
    const std::size_t n = categories.size();
    std::vector<double> prior(n, 0.0);
    bool has_prior = false;
    std::vector<std::string> objects;
    std::vector<std::vector<double>> lik;
    for (const auto& [ln, tk] : tokenized_lines(text)) {
        if (tk[0] == "prior") {
            if (tk.size() != 3) throw ParseError("expected 'prior <category> <p>'", ln);
            prior[static_cast<std::size_t>(parse_category(categories, tk[1], ln))] = parse_prob(tk[2], ln);
            has_prior = true;
        } else if (tk[0] == "likelihood") {
            if (tk.size() != 4) throw ParseError("expected 'likelihood <object> <category> <p>'", ln);
            auto it = std::find(objects.begin(), objects.end(), tk[1]);
            if (it == objects.end()) {
                objects.push_back(tk[1]);
                lik.emplace_back(n, kLikelihoodFloor);
                it = objects.end() - 1;
            }
            lik[static_cast<std::size_t>(it - objects.begin())][static_cast<std::size_t>(parse_category(categories, tk[2], ln))] =
                parse_prob(tk[3], ln);
        } else {
            throw ParseError("unknown directive '" + tk[0] + "'", ln);
        }
    }
    CategoryDistribution p = has_prior ? checked_distribution(prior, "place prior") : CategoryDistribution::uniform(n);
    return CooccurrenceTable(categories, std::move(objects), std::move(lik), std::move(p));
}

CooccurrenceTable load_cooccurrence(const std::filesystem::path& path, const CategorySet& categories) {
    return parse_cooccurrence(read_file(path, "co-occurrence table"), categories);
}

const Zone& dominant_zone(const GridWorld& world, std::span<const CellIndex> visible) {
    if (visible.empty()) throw ArgumentError("dominant_zone needs at least one visible cell");
    std::vector<int> counts(world.zones.size(), 0);
    for (CellIndex c : visible) ++counts[static_cast<std::size_t>(world.zone_of[static_cast<std::size_t>(c)])];
    const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    return world.zones[static_cast<std::size_t>(best)];
}

const Zone& dominant_zone(const GridWorld& world, const Viewpoint& vp) {
    const auto cells = visible_cells(world, vp);
    return dominant_zone(world, cells);
}

CategoryDistribution sample_around(const CategoryDistribution& mean, double kappa, Rng& rng) {
    std::vector<double> draw(mean.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double shape = kappa * mean[i];
        if (shape <= 0.0) continue;
        std::gamma_distribution<double> gamma(shape, 1.0);
        sum += draw[i] = gamma(rng);
    }
    // All-zero underflow is possible only for tiny shapes; fall back to the mean.
    if (!(sum > 0.0)) return mean;
    for (double& v : draw) v /= sum;
    return {std::move(draw)};
}

CategoryDistribution classify_appearance(const GridWorld& world, std::span<const CellIndex> visible,
                                         const AppearanceModel& model, Rng& rng) {
    const Zone& zone = dominant_zone(world, visible);
    const CategoryDistribution& row = model.confusion.at(static_cast<std::size_t>(zone.true_category));
    if (!model.concentration) return row;
    return sample_around(row, *model.concentration, rng);
}

CategoryDistribution classify_appearance(const GridWorld& world, const Viewpoint& vp, const AppearanceModel& model,
                                         Rng& rng) {
    const auto cells = visible_cells(world, vp);
    return classify_appearance(world, cells, model, rng);
}

std::vector<std::string> detect_objects(const GridWorld& world, std::span<const CellIndex> visible,
                                        const ObjectDetectorModel& model, Rng& rng) {
    std::vector<std::string> out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& o : world.objects) {
        if (!std::binary_search(visible.begin(), visible.end(), world.index(o.cell))) continue;
        if (unit(rng) < model.probability(o.category)) out.push_back(o.category);
    }
    return out;
}

std::vector<std::string> detect_objects(const GridWorld& world, const Viewpoint& vp, const ObjectDetectorModel& model,
                                        Rng& rng) {
    const auto cells = visible_cells(world, vp);
    return detect_objects(world, cells, model, rng);
}

CategoryDistribution classify_objects(std::span<const std::string> detections, const CooccurrenceTable& table) {
    std::set<int> present;
    for (const auto& d : detections) {
        const int o = table.find_object(d);
        if (o < 0) throw ArgumentError("object category '" + d + "' is not in the co-occurrence table");
        present.insert(o);
    }
    const std::size_t n = table.categories().size();
    std::vector<double> logp(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double p = table.prior()[c];
        logp[c] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        for (int o : present) logp[c] += std::log(table.likelihood(static_cast<std::size_t>(o), c));
    }
    if (present.empty()) return table.prior();
    return CategoryDistribution::from_log(logp);
}

}  // namespace confmap
