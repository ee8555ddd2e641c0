#include "qclab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace qclab {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
        if (!(a.mass > 0.0)) throw std::invalid_argument("DiscreteMeasure: masses must be positive");
        total_ += a.mass;
    }
}

double DiscreteMeasure::ball_mass(const Ball& b) const {
    double m = 0.0;
    for (const auto& a : atoms_)
        if (std::abs(a.pos - b.center) <= b.radius) m += a.mass;
    return m;
}

DiscreteMeasure DiscreteMeasure::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("scaled: lambda must be positive");
    std::vector<Atom> out = atoms_;
    for (auto& a : out) a.mass *= lambda;
    return DiscreteMeasure(std::move(out));
}

DiscreteMeasure DiscreteMeasure::translated(complexd shift) const {
    std::vector<Atom> out = atoms_;
    for (auto& a : out) a.pos += shift;
    return DiscreteMeasure(std::move(out));
}

double DiscreteMeasure::support_diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (std::size_t j = i + 1; j < atoms_.size(); ++j)
            d = std::max(d, std::abs(atoms_[i].pos - atoms_[j].pos));
    return d;
}

void DiscreteMeasure::to_csv(std::ostream& os) const {
    os << "re_x,im_x,mass\n";
    os.precision(17);
    for (const auto& a : atoms_)
        os << a.pos.real() << ',' << a.pos.imag() << ',' << a.mass << '\n';
}

DiscreteMeasure DiscreteMeasure::from_csv(std::istream& is) {
    std::vector<Atom> atoms;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {  // header
            first = false;
            if (line.rfind("re_x", 0) == 0) continue;
        }
        std::istringstream ls(line);
        double re, im, m;
        char c1, c2;
        if (!(ls >> re >> c1 >> im >> c2 >> m)) throw std::runtime_error("DiscreteMeasure: bad CSV row: " + line);
        atoms.push_back({complexd(re, im), m});
    }
    return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure DiscreteMeasure::load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return from_csv(f);
}

void DiscreteMeasure::save_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    to_csv(f);
}

DyadicCellSet::DyadicCellSet(int lvl, std::vector<DyadicCell> cs) : level(lvl), cells(std::move(cs)) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

bool DyadicCellSet::contains(const DyadicCell& c) const {
    return std::binary_search(cells.begin(), cells.end(), c);
}

complexd DyadicCellSet::cell_center(const DyadicCell& c) const {
    const double s = side();
    return complexd((static_cast<double>(c.i) + 0.5) * s, (static_cast<double>(c.j) + 0.5) * s);
}

Ball DyadicCellSet::cell_ball(const DyadicCell& c) const {
    return Ball(cell_center(c), side() * std::numbers::sqrt2 / 2.0);
}

std::string DyadicCellSet::to_json() const {
    nlohmann::json j;
    j["level"] = level;
    auto& arr = j["cells"] = nlohmann::json::array();
    for (const auto& c : cells) arr.push_back({c.i, c.j});
    return j.dump();
}

DyadicCellSet DyadicCellSet::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::vector<DyadicCell> cells;
    for (const auto& e : j.at("cells")) cells.push_back({e.at(0).get<std::int64_t>(), e.at(1).get<std::int64_t>()});
    return DyadicCellSet(j.at("level").get<int>(), std::move(cells));
}

}  // namespace qclab
