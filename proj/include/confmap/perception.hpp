#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confmap/world.hpp"

namespace confmap {

/// Probability vector aligned to a CategorySet.
struct CategoryDistribution {
    std::vector<double> probs;

    static CategoryDistribution uniform(std::size_t n);
    /// Normalizes non-negative weights; throws ArgumentError on a negative,
    /// non-finite or all-zero input.
    static CategoryDistribution normalized(std::vector<double> weights);
    /// Normalizes log-weights with log-sum-exp.
    static CategoryDistribution from_log(std::span<const double> log_weights);

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t i) const { return probs[i]; }
    /// Entries in [0,1] summing to 1 within `tol`.
    bool valid(double tol = 1e-9) const;
    /// Highest-probability index; ties go to the lowest index.
    Label argmax() const;

    friend bool operator==(const CategoryDistribution&, const CategoryDistribution&) = default;
};

/// Stand-in for a trained scene classifier: row t of `confusion` is the
/// output distribution when the true category is t.
struct AppearanceModel {
    std::vector<CategoryDistribution> confusion;
    std::optional<double> concentration;  // nullopt = deterministic

    static AppearanceModel identity(std::size_t n);
    void validate(std::size_t n_categories) const;
};

/// Text format, one directive per line:
///   concentration <k> | concentration deterministic
///   row <true-category> <p_0> ... <p_{n-1}>     (CategorySet order)
/// Rows not listed default to the identity row.
AppearanceModel parse_appearance_model(const std::string& text, const CategorySet& categories);
AppearanceModel load_appearance_model(const std::filesystem::path& path, const CategorySet& categories);

struct ObjectDetectorModel {
    std::map<std::string, double> p_detect;  // missing categories use default_p
    double default_p = 1.0;

    double probability(const std::string& category) const;
    void validate() const;
};

inline constexpr double kLikelihoodFloor = 1e-3;
inline constexpr double kLikelihoodCap = 1.0 - 1e-3;

/// P(object present | place) for every (object, place) pair plus a place
/// prior. Likelihoods are clamped into [floor, cap] on construction.
class CooccurrenceTable {
public:
    CooccurrenceTable() = default;
    CooccurrenceTable(CategorySet categories, std::vector<std::string> objects,
                      std::vector<std::vector<double>> likelihood, CategoryDistribution prior);

    const CategorySet& categories() const { return categories_; }
    const std::vector<std::string>& objects() const { return objects_; }
    const CategoryDistribution& prior() const { return prior_; }
    /// Index of an object category, or -1.
    int find_object(const std::string& name) const;
    double likelihood(std::size_t object, std::size_t category) const { return likelihood_[object][category]; }

private:
    CategorySet categories_;
    std::vector<std::string> objects_;
    std::vector<std::vector<double>> likelihood_;
    CategoryDistribution prior_;
};

/// `prior <category> <p>` and `likelihood <object> <category> <p>` lines.
/// Without prior lines the prior is uniform; unlisted pairs get the floor.
CooccurrenceTable parse_cooccurrence(const std::string& text, const CategorySet& categories);
CooccurrenceTable load_cooccurrence(const std::filesystem::path& path, const CategorySet& categories);

/// Zone owning the most visible cells; ties by lowest zone id.
const Zone& dominant_zone(const GridWorld& world, const Viewpoint& vp);
const Zone& dominant_zone(const GridWorld& world, std::span<const CellIndex> visible);

CategoryDistribution classify_appearance(const GridWorld& world, const Viewpoint& vp, const AppearanceModel& model,
                                         Rng& rng);
CategoryDistribution classify_appearance(const GridWorld& world, std::span<const CellIndex> visible,
                                         const AppearanceModel& model, Rng& rng);

/// Perturbs `mean` with a Dirichlet draw of concentration `kappa`.
CategoryDistribution sample_around(const CategoryDistribution& mean, double kappa, Rng& rng);

/// Categories of visible objects (ascending id) kept independently with
/// probability p_detect. One uniform draw per visible object.
std::vector<std::string> detect_objects(const GridWorld& world, const Viewpoint& vp, const ObjectDetectorModel& model,
                                        Rng& rng);
std::vector<std::string> detect_objects(const GridWorld& world, std::span<const CellIndex> visible,
                                        const ObjectDetectorModel& model, Rng& rng);

/// Naive Bayes over the distinct detected categories (presence semantics),
/// accumulated in log space.
CategoryDistribution classify_objects(std::span<const std::string> detections, const CooccurrenceTable& table);

}  // namespace confmap
