#include "nilab/point.hpp"

#include "nilab/errors.hpp"
#include "nilab/rational.hpp"

#include <algorithm>

namespace nilab {

Point Point::atom(std::vector<int> coords) {
    Point p;
    p.kind_ = Kind::Atom;
    p.coords_ = std::move(coords);
    return p;
}

Point Point::tuple(std::vector<Point> parts) {
    Point p;
    p.kind_ = Kind::Tuple;
    p.parts_ = std::move(parts);
    return p;
}

Point Point::cell(std::vector<Point> members) {
    Point p;
    p.kind_ = Kind::Cell;
    std::sort(members.begin(), members.end());
    p.parts_ = std::move(members);
    return p;
}

bool Point::operator==(const Point& o) const {
    return kind_ == o.kind_ && coords_ == o.coords_ && parts_ == o.parts_;
}

std::strong_ordering Point::operator<=>(const Point& o) const {
    if (auto c = kind_ <=> o.kind_; c != 0) return c;
    if (kind_ == Kind::Atom) return coords_ <=> o.coords_;
    return parts_ <=> o.parts_;
}

std::string Point::str() const {
    std::string s;
    switch (kind_) {
    case Kind::Atom: {
        s = "(";
        for (size_t i = 0; i < coords_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(coords_[i]);
        }
        s += ")";
        break;
    }
    case Kind::Tuple:
    case Kind::Cell: {
        s = kind_ == Kind::Tuple ? "(" : "{";
        for (size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ",";
            s += parts_[i].str();
        }
        s += kind_ == Kind::Tuple ? ")" : "}";
        break;
    }
    }
    return s;
}

nlohmann::ordered_json Point::to_json() const {
    nlohmann::ordered_json j;
    if (kind_ == Kind::Atom) {
        j = nlohmann::ordered_json::array();
        for (int c : coords_) j.push_back(c);
        return j;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Point& p : parts_) arr.push_back(p.to_json());
    if (kind_ == Kind::Tuple) return arr;
    return nlohmann::ordered_json{{"cell", arr}};
}

Point Point::from_json(const nlohmann::json& j) {
    if (j.is_object()) {
        if (!j.contains("cell") || !j["cell"].is_array())
            throw InputError("point object must be {\"cell\": [...]}, got " + j.dump());
        std::vector<Point> members;
        for (const auto& m : j["cell"]) members.push_back(from_json(m));
        return cell(std::move(members));
    }
    if (!j.is_array())
        throw InputError("point must be an array or a cell object, got " + j.dump());
    if (j.empty()) return atom({});
    if (j[0].is_number_integer()) {
        std::vector<int> coords;
        for (const auto& c : j) {
            if (!c.is_number_integer())
                throw InputError("mixed point coordinates in " + j.dump());
            coords.push_back(c.get<int>());
        }
        return atom(std::move(coords));
    }
    std::vector<Point> parts;
    for (const auto& p : j) parts.push_back(from_json(p));
    return tuple(std::move(parts));
}

Rational Rational::parse(const std::string& s) {
    auto parse_int = [](const std::string& t) -> std::int64_t {
        if (t.empty()) throw InputError("empty integer in rational");
        size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(t, &pos);
        } catch (const std::exception&) {
            throw InputError("bad rational literal '" + t + "'");
        }
        if (pos != t.size()) throw InputError("bad rational literal '" + t + "'");
        return v;
    };
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s));
    return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

} // namespace nilab
