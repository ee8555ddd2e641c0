#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qclab {

using complexd = std::complex<double>;

struct Ball {
    complexd center;
    double radius = 0.0;

    Ball() = default;
    Ball(complexd c, double r) : center(c), radius(r) {
        if (!(r > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
    }
    bool contains(complexd z) const { return std::abs(z - center) <= radius; }
};

struct Atom {
    complexd pos;
    double mass = 0.0;
};

/// Finite atomic measure on the plane. Immutable after construction.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double total() const { return total_; }
    bool empty() const { return atoms_.empty(); }

    /// Mass of the closed ball.
    double ball_mass(const Ball& b) const;

    DiscreteMeasure scaled(double lambda) const;
    DiscreteMeasure translated(complexd shift) const;

    /// Largest pairwise distance between atoms (0 for fewer than two atoms).
    double support_diameter() const;

    // CSV columns: re_x, im_x, mass
    void to_csv(std::ostream& os) const;
    static DiscreteMeasure from_csv(std::istream& is);
    static DiscreteMeasure load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

private:
    std::vector<Atom> atoms_;
    double total_ = 0.0;
};

struct DyadicCell {
    std::int64_t i = 0;
    std::int64_t j = 0;
    friend bool operator==(const DyadicCell&, const DyadicCell&) = default;
    friend auto operator<=>(const DyadicCell&, const DyadicCell&) = default;
};

/// Finite union of dyadic cells at a single level; side length 2^-level.
struct DyadicCellSet {
    int level = 0;
    std::vector<DyadicCell> cells;   // kept sorted and unique

    DyadicCellSet() = default;
    DyadicCellSet(int lvl, std::vector<DyadicCell> cs);

    double side() const { return std::ldexp(1.0, -level); }
    bool contains(const DyadicCell& c) const;
    complexd cell_center(const DyadicCell& c) const;
    /// Closed ball circumscribing the cell square.
    Ball cell_ball(const DyadicCell& c) const;

    std::string to_json() const;
    static DyadicCellSet from_json(const std::string& text);
};

}  // namespace qclab
