#include "oelab/odometer.hpp"

#include <algorithm>
#include <cstdlib>

#include "oelab/errors.hpp"

namespace oelab {

std::string to_string(const Rational& q)
{
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

OdometerSpace::OdometerSpace(std::vector<int> bases, int depth) : bases_(std::move(bases)), depth_(depth)
{
    if (bases_.empty())
        throw PreconditionError("odometer dimension must be at least 1");
    for (int p : bases_)
        if (p < 2 || p > 255)
            throw PreconditionError("odometer bases must lie in [2, 255]");
    if (depth_ < 1)
        throw PreconditionError("truncation depth must be at least 1");
}

bool OdometerSpace::single_base() const
{
    return std::all_of(bases_.begin(), bases_.end(), [&](int p) { return p == bases_.front(); });
}

std::uint64_t OdometerSpace::modulus(int i, int k) const
{
    const auto p = static_cast<std::uint64_t>(base(i));
    std::uint64_t m = 1;
    for (int j = 0; j < k; ++j) {
        if (m > (1ull << 62) / p)
            throw BudgetExceeded("p^k exceeds 2^62");
        m *= p;
    }
    return m;
}

std::uint64_t OdometerSpace::point_count(std::uint64_t limit) const
{
    std::uint64_t n = 1;
    for (int i = 0; i < dim(); ++i) {
        const auto m = modulus(i);
        if (n > limit / m)
            throw BudgetExceeded("more than " + std::to_string(limit) + " depth-N points");
        n *= m;
    }
    return n;
}

std::string digits_to_string(const Digits& d)
{
    std::string s;
    for (auto x : d)
        s += x < 10 ? static_cast<char>('0' + x) : static_cast<char>('a' + x - 10);
    return s;
}

Digits digits_from_string(const std::string& s)
{
    Digits d;
    for (char c : s) {
        if (c >= '0' && c <= '9')
            d.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (c >= 'a' && c <= 'z')
            d.push_back(static_cast<std::uint8_t>(c - 'a' + 10));
        else
            throw PreconditionError(std::string("bad digit '") + c + "'");
    }
    return d;
}

void to_json(nlohmann::json& j, const DigitPoint& x)
{
    j = nlohmann::json::array();
    for (const auto& d : x.digits)
        j.push_back(digits_to_string(d));
}

DigitPoint zero_point(const OdometerSpace& space)
{
    return DigitPoint{std::vector<Digits>(static_cast<std::size_t>(space.dim()),
                                          Digits(static_cast<std::size_t>(space.depth()), 0))};
}

DigitPoint point_from_values(std::span<const std::uint64_t> values, const OdometerSpace& space)
{
    if (values.size() != static_cast<std::size_t>(space.dim()))
        throw DimensionMismatch("value vector has wrong dimension");
    DigitPoint x = zero_point(space);
    for (int i = 0; i < space.dim(); ++i) {
        auto v = values[static_cast<std::size_t>(i)];
        const auto p = static_cast<std::uint64_t>(space.base(i));
        for (auto& digit : x.digits[static_cast<std::size_t>(i)]) {
            digit = static_cast<std::uint8_t>(v % p);
            v /= p;
        }
    }
    return x;
}

std::vector<std::uint64_t> point_values(const DigitPoint& x, const OdometerSpace& space)
{
    std::vector<std::uint64_t> values;
    for (int i = 0; i < space.dim(); ++i) {
        space.modulus(i);  // range check
        const auto& d = x.digits.at(static_cast<std::size_t>(i));
        std::uint64_t v = 0;
        for (auto it = d.rbegin(); it != d.rend(); ++it)
            v = v * static_cast<std::uint64_t>(space.base(i)) + *it;
        values.push_back(v);
    }
    return values;
}

DigitPoint point_from_index(std::uint64_t index, const OdometerSpace& space)
{
    std::vector<std::uint64_t> values;
    for (int i = 0; i < space.dim(); ++i) {
        const auto m = space.modulus(i);
        values.push_back(index % m);
        index /= m;
    }
    return point_from_values(values, space);
}

std::uint64_t point_index(const DigitPoint& x, const OdometerSpace& space)
{
    const auto values = point_values(x, space);
    std::uint64_t index = 0;
    for (int i = space.dim() - 1; i >= 0; --i)
        index = index * space.modulus(i) + values[static_cast<std::size_t>(i)];
    return index;
}

void validate_point(const DigitPoint& x, const OdometerSpace& space)
{
    if (x.digits.size() != static_cast<std::size_t>(space.dim()))
        throw DimensionMismatch("digit point has wrong dimension");
    for (int i = 0; i < space.dim(); ++i) {
        const auto& d = x.digits[static_cast<std::size_t>(i)];
        if (d.size() != static_cast<std::size_t>(space.depth()))
            throw PreconditionError("digit string length differs from the truncation depth");
        for (auto digit : d)
            if (digit >= space.base(i))
                throw PreconditionError("digit out of range for base " + std::to_string(space.base(i)));
    }
}

void add_in_place(Digits& digits, std::int64_t v, int p)
{
    if (v == 0 || digits.empty())
        return;
    const bool subtract = v < 0;
    // Magnitude as unsigned so that INT64_MIN is representable.
    auto magnitude = subtract ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
    const auto base = static_cast<std::uint64_t>(p);
    std::int64_t carry = 0;
    for (auto& digit : digits) {
        const auto step = static_cast<std::int64_t>(magnitude % base);
        magnitude /= base;
        std::int64_t t = subtract ? static_cast<std::int64_t>(digit) - step - carry
                                  : static_cast<std::int64_t>(digit) + step + carry;
        if (subtract) {
            carry = t < 0 ? 1 : 0;
            t += carry * p;
        } else {
            carry = t >= p ? 1 : 0;
            t -= carry * p;
        }
        digit = static_cast<std::uint8_t>(t);
        if (magnitude == 0 && carry == 0)
            break;
    }
}

DigitPoint odometer_add(const DigitPoint& x, std::span<const std::int64_t> v, const OdometerSpace& space)
{
    if (v.size() != static_cast<std::size_t>(space.dim()) || x.digits.size() != v.size())
        throw DimensionMismatch("odometer_add: dimension mismatch");
    DigitPoint y = x;
    for (std::size_t i = 0; i < v.size(); ++i)
        add_in_place(y.digits[i], v[i], space.base(static_cast<int>(i)));
    return y;
}

bool Cylinder::contains(const DigitPoint& x) const
{
    for (std::size_t i = 0; i < prefixes.size(); ++i)
        if (!std::equal(prefixes[i].begin(), prefixes[i].end(), x.digits[i].begin()))
            return false;
    return true;
}

void to_json(nlohmann::json& j, const Cylinder& c)
{
    j = nlohmann::json::array();
    for (const auto& p : c.prefixes)
        j.push_back(digits_to_string(p));
}

Cylinder whole_cylinder(const OdometerSpace& space)
{
    return Cylinder{std::vector<Digits>(static_cast<std::size_t>(space.dim()))};
}

std::optional<Cylinder> intersect(const Cylinder& a, const Cylinder& b)
{
    if (a.prefixes.size() != b.prefixes.size())
        throw DimensionMismatch("cylinders of different dimension");
    Cylinder c;
    for (std::size_t i = 0; i < a.prefixes.size(); ++i) {
        const auto& p = a.prefixes[i];
        const auto& q = b.prefixes[i];
        const auto n = std::min(p.size(), q.size());
        if (!std::equal(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n), q.begin()))
            return std::nullopt;
        c.prefixes.push_back(p.size() >= q.size() ? p : q);
    }
    return c;
}

bool disjoint(const Cylinder& a, const Cylinder& b) { return !intersect(a, b).has_value(); }

Cylinder translate(const Cylinder& c, std::span<const std::int64_t> v, const OdometerSpace& space)
{
    if (v.size() != c.prefixes.size())
        throw DimensionMismatch("translate: dimension mismatch");
    Cylinder out = c;
    for (std::size_t i = 0; i < v.size(); ++i)
        add_in_place(out.prefixes[i], v[i], space.base(static_cast<int>(i)));
    return out;
}

Cylinder cylinder_of(const DigitPoint& x, int k)
{
    Cylinder c;
    for (const auto& d : x.digits)
        c.prefixes.emplace_back(d.begin(), d.begin() + std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(d.size())));
    return c;
}

ClopenSet::ClopenSet(std::vector<Cylinder> cylinders) : cylinders_(std::move(cylinders))
{
    std::sort(cylinders_.begin(), cylinders_.end());
    for (std::size_t i = 0; i < cylinders_.size(); ++i)
        for (std::size_t j = i + 1; j < cylinders_.size(); ++j)
            if (!disjoint(cylinders_[i], cylinders_[j]))
                throw PreconditionError("clopen set has overlapping cylinders");
}

ClopenSet ClopenSet::whole(const OdometerSpace& space) { return ClopenSet({whole_cylinder(space)}); }

bool ClopenSet::contains(const DigitPoint& x) const
{
    return std::any_of(cylinders_.begin(), cylinders_.end(), [&](const Cylinder& c) { return c.contains(x); });
}

std::size_t ClopenSet::max_prefix_length() const
{
    std::size_t n = 0;
    for (const auto& c : cylinders_)
        for (const auto& p : c.prefixes)
            n = std::max(n, p.size());
    return n;
}

void to_json(nlohmann::json& j, const ClopenSet& u)
{
    j = nlohmann::json::array();
    for (const auto& c : u.cylinders())
        j.push_back(c);
}

ClopenSet intersect(const ClopenSet& a, const ClopenSet& b)
{
    std::vector<Cylinder> out;
    for (const auto& x : a.cylinders())
        for (const auto& y : b.cylinders())
            if (auto c = intersect(x, y))
                out.push_back(std::move(*c));
    return ClopenSet(std::move(out));
}

ClopenSet disjoint_union(const ClopenSet& a, const ClopenSet& b)
{
    auto cylinders = a.cylinders();
    cylinders.insert(cylinders.end(), b.cylinders().begin(), b.cylinders().end());
    return ClopenSet(std::move(cylinders));
}

ClopenSet translate(const ClopenSet& u, std::span<const std::int64_t> v, const OdometerSpace& space)
{
    std::vector<Cylinder> out;
    out.reserve(u.cylinders().size());
    for (const auto& c : u.cylinders())
        out.push_back(translate(c, v, space));
    return ClopenSet(std::move(out));
}

bool intersects(const ClopenSet& a, const ClopenSet& b)
{
    for (const auto& x : a.cylinders())
        for (const auto& y : b.cylinders())
            if (!disjoint(x, y))
                return true;
    return false;
}

namespace {

std::vector<Cylinder> complement_of(const Cylinder& c, const OdometerSpace& space)
{
    std::vector<Cylinder> out;
    for (std::size_t i = 0; i < c.prefixes.size(); ++i) {
        const auto& p = c.prefixes[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            for (int digit = 0; digit < space.base(static_cast<int>(i)); ++digit) {
                if (digit == p[j])
                    continue;
                Cylinder piece = whole_cylinder(space);
                for (std::size_t k = 0; k < i; ++k)
                    piece.prefixes[k] = c.prefixes[k];
                piece.prefixes[i].assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(j));
                piece.prefixes[i].push_back(static_cast<std::uint8_t>(digit));
                out.push_back(std::move(piece));
            }
        }
    }
    return out;
}

} // namespace

ClopenSet complement(const ClopenSet& u, const OdometerSpace& space)
{
    ClopenSet rest = ClopenSet::whole(space);
    for (const auto& c : u.cylinders())
        rest = intersect(rest, ClopenSet(complement_of(c, space)));
    return rest;
}

void validate_clopen(const ClopenSet& u, const OdometerSpace& space)
{
    for (const auto& c : u.cylinders()) {
        if (c.prefixes.size() != static_cast<std::size_t>(space.dim()))
            throw DimensionMismatch("cylinder has wrong dimension");
        for (int i = 0; i < space.dim(); ++i) {
            const auto& p = c.prefixes[static_cast<std::size_t>(i)];
            if (p.size() > static_cast<std::size_t>(space.depth()))
                throw TruncationError("cylinder prefix longer than the truncation depth");
            for (auto digit : p)
                if (digit >= space.base(i))
                    throw PreconditionError("cylinder digit out of range");
        }
    }
}

Rational haar_measure(const Cylinder& c, const OdometerSpace& space)
{
    Rational m = 1;
    for (int i = 0; i < space.dim(); ++i) {
        boost::multiprecision::cpp_int denom = 1;
        for (std::size_t k = 0; k < c.prefixes.at(static_cast<std::size_t>(i)).size(); ++k)
            denom *= space.base(i);
        m /= Rational(denom);
    }
    return m;
}

Rational haar_measure(const ClopenSet& u, const OdometerSpace& space)
{
    validate_clopen(u, space);
    Rational m = 0;
    for (const auto& c : u.cylinders())
        m += haar_measure(c, space);
    return m;
}

bool is_partition(const Partition& pieces, const OdometerSpace& space)
{
    Rational total = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        total += haar_measure(pieces[i], space);
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
            if (intersects(pieces[i], pieces[j]))
                return false;
    }
    return total == 1;
}

Partition refine_common(const std::vector<Partition>& partitions, const OdometerSpace& space)
{
    Partition current{ClopenSet::whole(space)};
    for (const auto& p : partitions) {
        if (!is_partition(p, space))
            throw PreconditionError("refine_common: input is not a partition of X");
        Partition next;
        for (const auto& a : current)
            for (const auto& b : p) {
                auto c = intersect(a, b);
                if (!c.empty())
                    next.push_back(std::move(c));
            }
        current = std::move(next);
    }
    std::sort(current.begin(), current.end());
    return current;
}

void require_unimodular_action(const IntMatrix& A, const OdometerSpace& space)
{
    if (A.rows() != space.dim() || A.cols() != space.dim())
        throw DimensionMismatch("matrix size differs from the odometer dimension");
    if (!space.single_base())
        throw PreconditionError("matrix action requires a single base for all coordinates");
    const auto det = integer_determinant(A);
    if (det != 1 && det != -1)
        throw PreconditionError("matrix is not unimodular (det " + std::to_string(det) + ")");
}

DigitPoint matrix_act(const IntMatrix& A, const DigitPoint& x, const OdometerSpace& space)
{
    require_unimodular_action(A, space);
    const auto m = static_cast<__int128>(space.modulus(0));
    const auto values = point_values(x, space);
    std::vector<std::uint64_t> out(values.size());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        __int128 acc = 0;
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            __int128 a = A(i, j) % m;
            if (a < 0)
                a += m;
            acc = (acc + a * static_cast<__int128>(values[static_cast<std::size_t>(j)])) % m;
        }
        out[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(acc);
    }
    return point_from_values(out, space);
}

Verdict bijectivity_check_depthN(const IntMatrix& A, const OdometerSpace& space)
{
    require_unimodular_action(A, space);
    const auto n = space.point_count(1ull << 20);
    Verdict v("matrix action permutes depth-N points");
    std::vector<std::int64_t> preimage(n, -1);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto j = point_index(matrix_act(A, point_from_index(i, space), space), space);
        if (preimage[j] >= 0 && !v.saturated()) {
            v.fail({{"collision", {point_from_index(static_cast<std::uint64_t>(preimage[j]), space),
                                   point_from_index(i, space)}},
                    {"image", point_from_index(j, space)}});
        }
        preimage[j] = static_cast<std::int64_t>(i);
    }
    v.info["points"] = n;
    return v;
}

Verdict minimality_witness(const OdometerSpace& space, int k)
{
    if (k < 0 || k > space.depth())
        throw PreconditionError("minimality depth must lie in [0, N]");
    Verdict v("orbit of 0 visits every depth-k cylinder");
    std::uint64_t cylinders = 1;
    std::vector<std::uint64_t> periods;
    for (int i = 0; i < space.dim(); ++i) {
        periods.push_back(space.modulus(i, k));
        cylinders *= periods.back();
    }
    if (cylinders > (1ull << 24))
        throw BudgetExceeded("too many depth-k cylinders");
    const OdometerSpace shallow(space.bases(), std::max(k, 1));
    std::vector<bool> seen(cylinders, false);
    std::uint64_t steps = 0;
    // Walk the orbit like a multi-dial odometer: step e_1, and when coordinate i
    // completes its period, step e_{i+1}.
    DigitPoint x = zero_point(space);
    std::vector<std::uint64_t> counter(periods.size(), 0);
    for (std::uint64_t visit = 0; visit < cylinders; ++visit) {
        std::uint64_t index = 0;
        if (k > 0) {
            DigitPoint prefix;
            for (const auto& d : x.digits)
                prefix.digits.emplace_back(d.begin(), d.begin() + k);
            index = point_index(prefix, shallow);
        }
        seen[index] = true;
        for (std::size_t i = 0; i < counter.size(); ++i) {
            LatticeVector step(counter.size(), 0);
            step[i] = 1;
            x = odometer_add(x, step, space);
            ++steps;
            if (++counter[i] < periods[i])
                break;
            counter[i] = 0;
            // coordinate i has gone around mod p^k; undo the wrap at depth N
            step[i] = -static_cast<std::int64_t>(periods[i]);
            x = odometer_add(x, step, space);
        }
    }
    const auto visited = static_cast<std::uint64_t>(std::count(seen.begin(), seen.end(), true));
    if (visited != cylinders) {
        for (std::uint64_t i = 0; i < cylinders && !v.saturated(); ++i)
            if (!seen[i])
                v.fail({{"unvisited_cylinder_index", i}});
    }
    v.info = {{"k", k}, {"cylinders", cylinders}, {"visited", visited}, {"steps", steps}};
    return v;
}

void to_json(nlohmann::json& j, const WanderingReport& r)
{
    j = nlohmann::json{{"radius", r.radius}, {"searched", r.searched}};
    j["witness"] = r.witness ? nlohmann::json(*r.witness) : nlohmann::json(nullptr);
}

WanderingReport wandering_check(const ClopenSet& u, int radius, const OdometerSpace& space)
{
    if (u.empty())
        throw PreconditionError("wandering_check needs a nonempty clopen set");
    validate_clopen(u, space);
    const auto metric = WordMetric::standard(Group::lattice(space.dim()), std::max(radius, 0));
    auto candidates = metric.ball(radius);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const auto& a, const auto& b) { return metric.length(a) < metric.length(b); });
    WanderingReport report;
    report.radius = radius;
    for (const auto& g : candidates) {
        if (g.is_identity())
            continue;
        ++report.searched;
        if (intersects(translate(u, g.coords(), space), u)) {
            report.witness = g.coords();
            break;
        }
    }
    return report;
}

} // namespace oelab
