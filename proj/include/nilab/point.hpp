#pragma once

#include <compare>
#include <string>
#include <vector>

#include <json.hpp>

namespace nilab {

/// A printable point value. Three shapes cover every construction:
///   Atom:  a group element, written as its coordinate list;
///   Tuple: a point of a product, one part per factor;
///   Cell:  a point of a quotient, the sorted set of its members.
/// Points are ordered lexicographically; cells compare by least member first,
/// which is exactly the canonical cell order the quotient constructions use.
class Point {
public:
    enum class Kind { Atom, Tuple, Cell };

    Point() : kind_(Kind::Atom) {}

    static Point atom(std::vector<int> coords);
    static Point tuple(std::vector<Point> parts);
    static Point cell(std::vector<Point> members); // sorts members

    Kind kind() const { return kind_; }
    const std::vector<int>& coords() const { return coords_; }
    const std::vector<Point>& parts() const { return parts_; }

    bool operator==(const Point& o) const;
    std::strong_ordering operator<=>(const Point& o) const;

    /// "(0,1)" for atoms, "((0),(1))" for tuples, "{(0),(1)}" for cells.
    std::string str() const;

    /// Atom -> [ints]; Tuple -> [parts]; Cell -> {"cell":[members]}.
    nlohmann::ordered_json to_json() const;
    static Point from_json(const nlohmann::json& j);

private:
    Kind kind_;
    std::vector<int> coords_;
    std::vector<Point> parts_;
};

} // namespace nilab
