#include "certmono/ingest.hpp"

#include "certmono/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace certmono {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& why) {
    fail(ErrorKind::ParseError, field + ": " + why);
}

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) parse_fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) parse_fail(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string child(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const std::string& as_string(const json& j, const std::string& path) {
    if (!j.is_string()) parse_fail(path, "expected a string");
    return j.get_ref<const std::string&>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) parse_fail(path, "expected an array");
    return j;
}

std::uint64_t as_natural(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        parse_fail(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

// Any Error from a nested parser becomes a ParseError naming the field.
template <class Fn>
auto at_field(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError && std::string_view(e.what()).find(path) != std::string_view::npos)
            throw;
        parse_fail(path, e.what());
    }
}

NFElement parse_coeff(const json& j, const FieldPtr& field, const std::string& path) {
    as_array(j, path);
    if (j.empty()) parse_fail(path, "empty coefficient");
    if (static_cast<int>(j.size()) > field->degree())
        parse_fail(path, "more coordinates than the field degree " + std::to_string(field->degree()));
    QPoly c;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = child(path, i);
        c.push_back(at_field(p, [&] { return parse_rational(as_string(j[i], p)); }));
    }
    c.resize(static_cast<std::size_t>(field->degree()), mpq_class(0));
    return NFElement(field, c);
}

json print_coeff(const NFElement& a) {
    QPoly c = a.coeffs();
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    if (c.empty()) c.push_back(mpq_class(0));
    json out = json::array();
    for (const auto& q : c) out.push_back(rational_to_string(q));
    return out;
}

NamedPoly parse_poly(const json& j, const FieldPtr& field, const std::string& path) {
    NamedPoly p;
    const std::string vpath = child(path, "vars");
    const json& vars = as_array(member(j, "vars", path), vpath);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string& v = as_string(vars[i], child(vpath, i));
        if (v.empty()) parse_fail(child(vpath, i), "empty variable name");
        if (std::find(p.vars.begin(), p.vars.end(), v) != p.vars.end()) parse_fail(child(vpath, i), "repeated variable");
        p.vars.push_back(v);
    }
    p.poly = ExactPoly(p.vars.size());
    const std::string tpath = child(path, "terms");
    const json& terms = as_array(member(j, "terms", path), tpath);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string ti = child(tpath, i);
        const NFElement c = parse_coeff(member(terms[i], "coeff", ti), field, child(ti, "coeff"));
        const std::string epath = child(ti, "exps");
        const json& exps = as_array(member(terms[i], "exps", ti), epath);
        if (exps.size() != p.vars.size())
            parse_fail(epath, "expected " + std::to_string(p.vars.size()) + " exponents");
        Monomial m;
        for (std::size_t k = 0; k < exps.size(); ++k) {
            const std::uint64_t e = as_natural(exps[k], child(epath, k));
            if (e > 1000) parse_fail(child(epath, k), "exponent too large");
            m.push_back(static_cast<std::uint32_t>(e));
        }
        p.poly.add_term(m, c);
    }
    return p;
}

json print_poly(const NamedPoly& p) {
    json out;
    out["vars"] = p.vars;
    json terms = json::array();
    // Highest monomials first reads more naturally.
    for (auto it = p.poly.terms().rbegin(); it != p.poly.terms().rend(); ++it) {
        json t;
        t["coeff"] = print_coeff(it->second);
        t["exps"] = it->first;
        terms.push_back(std::move(t));
    }
    out["terms"] = std::move(terms);
    return out;
}

BelyiEntry entry_from_json(const json& doc) {
    BelyiEntry e;
    e.label = as_string(member(doc, "label", ""), "label");
    if (e.label.empty()) parse_fail("label", "empty");
    e.degree = as_natural(member(doc, "degree", ""), "degree");
    if (e.degree < 1) parse_fail("degree", "must be at least 1");

    const json& bf = member(doc, "base_field", "");
    const json& mp = as_array(member(bf, "min_poly", "base_field"), "base_field.min_poly");
    QPoly m;
    for (std::size_t i = 0; i < mp.size(); ++i) {
        const std::string p = child("base_field.min_poly", i);
        m.push_back(at_field(p, [&] { return parse_rational(as_string(mp[i], p)); }));
    }
    e.field = at_field("base_field.min_poly", [&] { return std::make_shared<const NumberField>(m); });
    const json& emb = member(bf, "embedding", "base_field");
    e.embedding_re = as_string(member(emb, "re", "base_field.embedding"), "base_field.embedding.re");
    e.embedding_im = as_string(member(emb, "im", "base_field.embedding"), "base_field.embedding.im");
    at_field("base_field.embedding", [&] { return Complex::parse(e.embedding_re, e.embedding_im, 64); });

    const json& model = member(doc, "model", "");
    const std::string& type = as_string(member(model, "type", "model"), "model.type");
    if (type == "p1") {
        e.model = P1Model{parse_poly(member(model, "num", "model"), e.field, "model.num"),
                          parse_poly(member(model, "den", "model"), e.field, "model.den")};
    } else if (type == "smooth") {
        SmoothModel sm;
        const json& eqs = as_array(member(model, "equations", "model"), "model.equations");
        for (std::size_t i = 0; i < eqs.size(); ++i)
            sm.equations.push_back(parse_poly(eqs[i], e.field, child("model.equations", i)));
        sm.num = parse_poly(member(model, "num", "model"), e.field, "model.num");
        sm.den = parse_poly(member(model, "den", "model"), e.field, "model.den");
        e.model = std::move(sm);
    } else if (type == "plane") {
        e.model = PlaneModel{parse_poly(member(model, "curve", "model"), e.field, "model.curve"),
                             parse_coeff(member(model, "lambda", "model"), e.field, "model.lambda")};
    } else {
        parse_fail("model.type", "unknown model type '" + type + "'");
    }

    const json& tr = member(doc, "triple", "");
    const auto perm = [&](const char* key) {
        const std::string p = child("triple", key);
        const std::string& text = as_string(member(tr, key, "triple"), p);
        return at_field(p, [&] { return Permutation::parse(text, e.degree); });
    };
    e.expected = {perm("s0"), perm("s1"), perm("sinf")};
    if (!e.expected.valid()) fail(ErrorKind::InvalidTriple, "triple: s0 s1 sinf is not the identity");

    if (const auto it = doc.find("group_order"); it != doc.end() && !it->is_null())
        e.group_order = as_natural(*it, "group_order");
    return e;
}

json entry_to_json(const BelyiEntry& e) {
    json doc;
    doc["label"] = e.label;
    doc["degree"] = e.degree;
    json mp = json::array();
    for (const auto& q : e.field->min_poly()) mp.push_back(rational_to_string(q));
    doc["base_field"] = {{"min_poly", mp}, {"embedding", {{"re", e.embedding_re}, {"im", e.embedding_im}}}};
    json model;
    if (const auto* p1 = std::get_if<P1Model>(&e.model)) {
        model["type"] = "p1";
        model["num"] = print_poly(p1->num);
        model["den"] = print_poly(p1->den);
    } else if (const auto* sm = std::get_if<SmoothModel>(&e.model)) {
        model["type"] = "smooth";
        model["equations"] = json::array();
        for (const auto& g : sm->equations) model["equations"].push_back(print_poly(g));
        model["num"] = print_poly(sm->num);
        model["den"] = print_poly(sm->den);
    } else {
        const auto& pl = std::get<PlaneModel>(e.model);
        model["type"] = "plane";
        model["curve"] = print_poly(pl.curve);
        model["lambda"] = print_coeff(pl.lambda);
    }
    doc["model"] = std::move(model);
    doc["triple"] = {{"s0", e.expected.s0.to_string()}, {"s1", e.expected.s1.to_string()},
                     {"sinf", e.expected.sinf.to_string()}};
    if (e.group_order) doc["group_order"] = *e.group_order;
    return doc;
}

bool same_poly(const NamedPoly& a, const NamedPoly& b) { return a.vars == b.vars && a.poly == b.poly; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::ParseError, "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Precondition, "cannot write " + tmp.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

BelyiEntry parse_entry(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
    return entry_from_json(doc);
}

BelyiEntry load_entry(const std::filesystem::path& path) {
    try {
        return parse_entry(read_file(path));
    } catch (const Error& e) {
        fail(e.kind(), path.filename().string() + ": " + e.what());
    }
}

std::string print_entry(const BelyiEntry& entry) { return entry_to_json(entry).dump(2) + "\n"; }

bool same_entry(const BelyiEntry& a, const BelyiEntry& b) {
    if (a.label != b.label || a.degree != b.degree || !(*a.field == *b.field) || a.embedding_re != b.embedding_re ||
        a.embedding_im != b.embedding_im || !(a.expected == b.expected) || a.group_order != b.group_order ||
        a.model.index() != b.model.index())
        return false;
    if (const auto* p = std::get_if<P1Model>(&a.model)) {
        const auto& q = std::get<P1Model>(b.model);
        return same_poly(p->num, q.num) && same_poly(p->den, q.den);
    }
    if (const auto* p = std::get_if<SmoothModel>(&a.model)) {
        const auto& q = std::get<SmoothModel>(b.model);
        if (p->equations.size() != q.equations.size()) return false;
        for (std::size_t i = 0; i < p->equations.size(); ++i)
            if (!same_poly(p->equations[i], q.equations[i])) return false;
        return same_poly(p->num, q.num) && same_poly(p->den, q.den);
    }
    const auto& p = std::get<PlaneModel>(a.model);
    const auto& q = std::get<PlaneModel>(b.model);
    return same_poly(p.curve, q.curve) && p.lambda == q.lambda;
}

std::vector<ComplexVector> parse_start_fiber(std::string_view text, Precision prec) {
    std::vector<ComplexVector> points;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0, width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string tok; ls >> tok;) tokens.push_back(tok);
        if (tokens.empty()) continue;
        const std::string where = "start fiber line " + std::to_string(lineno);
        if (tokens.size() % 2 != 0) fail(ErrorKind::ParseError, where + ": odd number of reals");
        if (width == 0) width = tokens.size();
        if (tokens.size() != width) fail(ErrorKind::ParseError, where + ": coordinate count differs from line 1");
        ComplexVector x;
        for (std::size_t i = 0; i < tokens.size(); i += 2) {
            try {
                x.push_back(Complex::parse(tokens[i], tokens[i + 1], prec));
            } catch (const Error& e) {
                fail(ErrorKind::ParseError, where + ": " + e.what());
            }
        }
        points.push_back(std::move(x));
    }
    if (points.empty()) fail(ErrorKind::ParseError, "start fiber: no points");
    return points;
}

std::vector<ComplexVector> load_start_fiber(const std::filesystem::path& path, Precision prec) {
    return parse_start_fiber(read_file(path), prec);
}

// ------------------------------------------------------------------ upstream

namespace upstream {

namespace {

[[noreturn]] void map_fail(const std::string& why) { fail(ErrorKind::SchemaMapError, why); }

struct RationalFunction {
    ExactPoly num, den;
};

class ExprParser {
public:
    ExprParser(std::string_view text, const std::vector<std::string>& vars, const FieldPtr& field)
        : text_(text), vars_(vars), field_(field), one_(field, mpq_class(1)) {}

    RationalFunction parse() {
        RationalFunction r = expr();
        skip();
        if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
        return r;
    }

private:
    std::string_view text_;
    const std::vector<std::string>& vars_;
    FieldPtr field_;
    NFElement one_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& why) const {
        map_fail("expression '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + why);
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool eat_power() {
        skip();
        if (text_.substr(pos_, 1) == "^") {
            pos_ += 1;
            return true;
        }
        if (text_.substr(pos_, 2) == "**") {
            pos_ += 2;
            return true;
        }
        return false;
    }

    std::size_t n() const { return vars_.size(); }
    RationalFunction constant(const NFElement& c) const {
        return {ExactPoly::constant(n(), c), ExactPoly::constant(n(), one_)};
    }

    static bool is_constant(const ExactPoly& p) { return p.total_degree() == 0; }
    static NFElement constant_value(const ExactPoly& p) {
        return p.terms().empty() ? NFElement() : p.terms().begin()->second;
    }

    // Folds a constant denominator into the numerator.
    RationalFunction normal(RationalFunction r) const {
        if (r.den.is_zero()) error("division by zero");
        if (is_constant(r.den)) {
            r.num = r.num.scaled(constant_value(r.den).inverse());
            r.den = ExactPoly::constant(n(), one_);
        }
        return r;
    }

    RationalFunction add(const RationalFunction& a, const RationalFunction& b, bool subtract) const {
        const ExactPoly bn = subtract ? -b.num : b.num;
        if (a.den == b.den) return normal({a.num + bn, a.den});
        return normal({a.num * b.den + bn * a.den, a.den * b.den});
    }

    RationalFunction expr() {
        RationalFunction r = term();
        for (;;) {
            if (eat('+')) r = add(r, term(), false);
            else if (eat('-')) r = add(r, term(), true);
            else return r;
        }
    }

    RationalFunction term() {
        RationalFunction r = unary();
        for (;;) {
            if (eat('*')) {
                const RationalFunction b = unary();
                r = normal({r.num * b.num, r.den * b.den});
            } else if (eat('/')) {
                const RationalFunction b = unary();
                if (b.num.is_zero()) error("division by zero");
                r = normal({r.num * b.den, r.den * b.num});
            } else {
                return r;
            }
        }
    }

    RationalFunction unary() {
        if (eat('-')) {
            RationalFunction r = unary();
            r.num = -r.num;
            return r;
        }
        if (eat('+')) return unary();
        return power();
    }

    RationalFunction power() {
        RationalFunction base = atom();
        if (!eat_power()) return base;
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) error("expected a non-negative integer exponent");
        const unsigned long k = std::stoul(std::string(text_.substr(start, pos_ - start)));
        if (k > 1000) error("exponent too large");
        return {base.num.pow(static_cast<unsigned>(k), one_), base.den.pow(static_cast<unsigned>(k), one_)};
    }

    RationalFunction atom() {
        skip();
        if (eat('(')) {
            RationalFunction r = expr();
            if (!eat(')')) error("expected ')'");
            return r;
        }
        if (pos_ >= text_.size()) error("unexpected end");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            try {
                return constant(NFElement(field_, parse_rational(text_.substr(start, pos_ - start))));
            } catch (const Error&) {
                error("bad number");
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            if (name == "nu") return constant(NFElement::generator(field_));
            const auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) error("unknown variable '" + name + "'");
            return {ExactPoly::variable(n(), static_cast<std::size_t>(it - vars_.begin()), one_),
                    ExactPoly::constant(n(), one_)};
        }
        error("unexpected '" + std::string(1, c) + "'");
    }
};

std::string number_text(const json& j, const std::string& what) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(17) << j.get<double>();
        return os.str();
    }
    map_fail(what + ": expected a number");
}

const json& need(const json& rec, const char* key) {
    const auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) map_fail(std::string("missing upstream field '") + key + "'");
    return *it;
}

std::string need_string(const json& rec, const char* key) {
    const json& j = need(rec, key);
    if (!j.is_string()) map_fail(std::string("upstream field '") + key + "' is not a string");
    return j.get<std::string>();
}

NamedPoly polynomial(const std::string& text, const std::vector<std::string>& vars, const FieldPtr& field) {
    auto [num, den] = parse_rational_function(text, vars, field);
    if (den.total_degree() != 0) map_fail("'" + text + "' is not a polynomial");
    return {vars, num};
}

} // namespace

std::pair<ExactPoly, ExactPoly> parse_rational_function(std::string_view text, const std::vector<std::string>& vars,
                                                        const FieldPtr& field) {
    RationalFunction r = ExprParser(text, vars, field).parse();
    return {std::move(r.num), std::move(r.den)};
}

std::string translate(std::string_view payload, std::string_view label) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::parse_error& e) {
        map_fail(std::string("payload is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array())
        map_fail("payload has no 'data' array");
    const json* rec = nullptr;
    for (const auto& r : doc["data"]) {
        if (r.is_object() && r.contains("label") && r["label"] == label) rec = &r;
    }
    if (rec == nullptr) fail(ErrorKind::NetworkError, "404: no upstream record for '" + std::string(label) + "'");

    try {
        BelyiEntry e;
        e.label = std::string(label);
        const json& deg = need(*rec, "deg");
        if (!deg.is_number_integer() || deg.get<long long>() < 1) map_fail("'deg' is not a positive integer");
        e.degree = deg.get<std::size_t>();

        const json& bf = need(*rec, "base_field");
        if (!bf.is_array() || bf.empty()) map_fail("'base_field' is not a coefficient list");
        QPoly m;
        for (const auto& c : bf) m.push_back(parse_rational(number_text(c, "base_field")));
        e.field = std::make_shared<const NumberField>(m);

        const json& embs = need(*rec, "embeddings");
        if (!embs.is_array() || embs.empty() || !embs[0].is_array() || embs[0].size() != 2)
            map_fail("'embeddings' is not a list of [re, im] pairs");
        e.embedding_re = number_text(embs[0][0], "embeddings");
        e.embedding_im = number_text(embs[0][1], "embeddings");

        // Triples are listed per embedding, as 1-based image lists.
        const json& triples = need(*rec, "triples");
        if (!triples.is_array() || triples.empty() || !triples[0].is_array() || triples[0].size() != 3)
            map_fail("'triples' is not a list of triples");
        std::vector<Permutation> perms;
        for (const auto& images : triples[0]) {
            if (!images.is_array() || images.size() != e.degree) map_fail("triple component of the wrong length");
            std::vector<std::uint32_t> img;
            for (const auto& v : images) {
                if (!v.is_number_integer() || v.get<long long>() < 1) map_fail("bad permutation image");
                img.push_back(static_cast<std::uint32_t>(v.get<long long>() - 1));
            }
            perms.emplace_back(std::move(img));
        }
        e.expected = {perms[0], perms[1], perms[2]};
        if (!e.expected.valid()) fail(ErrorKind::InvalidTriple, "upstream triple has product != identity");

        if (const auto it = rec->find("group_order"); it != rec->end() && it->is_number_unsigned())
            e.group_order = it->get<std::uint64_t>();

        const auto plane = rec->find("plane_model");
        if (plane != rec->end() && plane->is_string() && !plane->get<std::string>().empty()) {
            const NamedPoly curve = polynomial(plane->get<std::string>(), {"t", "x"}, e.field);
            const NamedPoly lambda = polynomial(need_string(*rec, "plane_constant"), {}, e.field);
            e.model = PlaneModel{curve, lambda.poly.is_zero() ? NFElement(e.field)
                                                               : lambda.poly.terms().begin()->second};
        } else {
            const std::string curve = need_string(*rec, "curve");
            const std::string map = need_string(*rec, "map");
            if (curve == "PP1") {
                auto [p, q] = parse_rational_function(map, {"x"}, e.field);
                e.model = P1Model{{{"x"}, p}, {{"x"}, q}};
            } else {
                const auto eq = curve.find('=');
                if (eq == std::string::npos || curve.find('=', eq + 1) != std::string::npos)
                    map_fail("curve '" + curve + "' is not one equation");
                const std::vector<std::string> vars{"x", "y"};
                auto [lhs, l_den] = parse_rational_function(curve.substr(0, eq), vars, e.field);
                auto [rhs, r_den] = parse_rational_function(curve.substr(eq + 1), vars, e.field);
                if (l_den.total_degree() != 0 || r_den.total_degree() != 0)
                    map_fail("curve '" + curve + "' is not polynomial");
                auto [p, q] = parse_rational_function(map, vars, e.field);
                e.model = SmoothModel{{{vars, lhs - rhs}}, {vars, p}, {vars, q}};
            }
        }
        // The document must satisfy the local schema as well.
        const std::string text = print_entry(e);
        parse_entry(text);
        return text;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SchemaMapError || e.kind() == ErrorKind::NetworkError) throw;
        map_fail(e.what());
    }
}

} // namespace upstream

// --------------------------------------------------------------------- cache

CacheStore::CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path CacheStore::default_dir() {
    if (const char* env = std::getenv("CERTMONO_CACHE"); env != nullptr && *env != '\0') return env;
    return "certmono-cache";
}

std::filesystem::path CacheStore::document_path(std::string_view label) const {
    return dir_ / (std::string(label) + ".json");
}

std::filesystem::path CacheStore::raw_path(std::string_view label) const {
    return dir_ / "raw" / (std::string(label) + ".json");
}

bool CacheStore::contains(std::string_view label) const { return std::filesystem::exists(document_path(label)); }

std::string CacheStore::read(std::string_view label) const { return read_file(document_path(label)); }

void CacheStore::store_raw(std::string_view label, const std::string& raw) { write_file(raw_path(label), raw); }

void CacheStore::store(std::string_view label, const std::string& document, const std::string& raw) {
    store_raw(label, raw);
    write_file(document_path(label), document);
    json index = json::object();
    const auto ipath = dir_ / "index.json";
    if (std::filesystem::exists(ipath)) {
        try {
            index = json::parse(read_file(ipath));
        } catch (const json::parse_error&) {
            index = json::object();
        }
    }
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    index[std::string(label)] = {{"fetched_at", now}};
    write_file(ipath, index.dump(2) + "\n");
}

long long CacheStore::fetched_at(std::string_view label) const {
    const auto ipath = dir_ / "index.json";
    if (!std::filesystem::exists(ipath)) return 0;
    try {
        const json index = json::parse(read_file(ipath));
        return index.at(std::string(label)).at("fetched_at").get<long long>();
    } catch (const std::exception&) {
        return 0;
    }
}

std::string fetch_entry(std::string_view label, CacheStore& cache, const FetchConfig& cfg) {
    if (!cfg.refresh && cache.contains(label)) return cache.read(label);

    std::string url = cfg.endpoint;
    for (std::size_t at; (at = url.find("{label}")) != std::string::npos;) url.replace(at, 7, label);
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) fail(ErrorKind::NetworkError, "bad endpoint '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    if (!client.is_valid()) fail(ErrorKind::NetworkError, "unsupported endpoint '" + origin + "'");
    const auto timeout = std::chrono::duration<double>(cfg.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_follow_location(true);
    const auto res = client.Get(path);
    if (!res) fail(ErrorKind::NetworkError, url + ": " + httplib::to_string(res.error()));
    if (res->status == 404) fail(ErrorKind::NetworkError, "404: " + url);
    if (res->status != 200) fail(ErrorKind::NetworkError, "HTTP " + std::to_string(res->status) + ": " + url);

    std::string document;
    try {
        document = upstream::translate(res->body, label);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SchemaMapError) cache.store_raw(label, res->body);
        throw;
    }
    cache.store(label, document, res->body);
    return document;
}

// ------------------------------------------------------------------- reports

namespace {

json triple_json(const PermutationTriple& t) {
    return {{"s0", t.s0.to_string()}, {"s1", t.s1.to_string()}, {"sinf", t.sinf.to_string()}};
}

} // namespace

std::string report_json(const VerifyReport& r, bool with_timings) {
    json j;
    j["label"] = r.label;
    j["status"] = std::string(to_string(r.status));
    if (r.status == VerifyStatus::Error) {
        j["error"] = {{"kind", r.error_kind ? std::string(to_string(*r.error_kind)) : std::string("Unknown")},
                      {"phase", r.error_phase},
                      {"message", r.error_message}};
    }
    if (r.computed) {
        j["computed"] = triple_json(*r.computed);
        j["cycle_types"] = {to_string(cycle_type(r.computed->s0)), to_string(cycle_type(r.computed->s1)),
                            to_string(cycle_type(r.computed->sinf))};
        j["group_order"] = r.group_order;
        j["transitive"] = r.transitive;
    }
    if (r.s3_index) j["s3_index"] = *r.s3_index;
    if (r.conjugator) j["conjugator"] = r.conjugator->to_string();
    if (!r.alpha.empty()) j["alpha"] = r.alpha;
    j["config"] = {{"seed", r.seed}, {"prec", r.prec}, {"base", r.base}, {"radius", r.radius}};
    j["final_prec"] = r.final_prec;
    j["retries"] = r.retries;
    if (with_timings) {
        json t = json::object();
        for (const auto& p : r.timings) t[p.phase] = p.seconds;
        j["timings"] = std::move(t);
    }
    return j.dump();
}

void write_reports_json(std::ostream& os, const std::vector<VerifyReport>& reports, bool with_timings) {
    for (const auto& r : reports) os << report_json(r, with_timings) << '\n';
}

void write_reports_text(std::ostream& os, const std::vector<VerifyReport>& reports) {
    std::size_t w = 5;
    for (const auto& r : reports) w = std::max(w, r.label.size());
    os << std::left << std::setw(static_cast<int>(w)) << "label" << "  " << std::setw(14) << "status"
       << "  " << std::setw(8) << "order" << "  " << std::setw(8) << "seconds" << "  detail\n";
    BatchSummary s;
    for (const auto& r : reports) {
        double secs = 0;
        for (const auto& p : r.timings) secs += p.seconds;
        std::string detail;
        if (r.status == VerifyStatus::Error) {
            detail = (r.error_kind ? std::string(to_string(*r.error_kind)) : std::string("error")) + " in " +
                     r.error_phase + ": " + r.error_message;
        } else if (r.computed) {
            detail = "types " + to_string(cycle_type(r.computed->s0)) + " " + to_string(cycle_type(r.computed->s1)) +
                     " " + to_string(cycle_type(r.computed->sinf));
            if (r.s3_index) detail += ", s3 index " + std::to_string(*r.s3_index);
        }
        std::ostringstream sec;
        sec << std::fixed << std::setprecision(2) << secs;
        os << std::left << std::setw(static_cast<int>(w)) << r.label << "  " << std::setw(14) << to_string(r.status)
           << "  " << std::setw(8) << (r.group_order.empty() ? "-" : r.group_order) << "  " << std::setw(8)
           << sec.str() << "  " << detail << '\n';
        switch (r.status) {
        case VerifyStatus::Pass: ++s.pass; break;
        case VerifyStatus::PassUpToS3: ++s.pass_up_to_s3; break;
        case VerifyStatus::PassInverse: ++s.pass_inverse; break;
        case VerifyStatus::FailTriple: ++s.fail_triple; break;
        case VerifyStatus::Error: ++s.error; break;
        }
    }
    os << s.total() << " entries: " << s.pass << " PASS, " << s.pass_up_to_s3 << " PASS_UP_TO_S3, " << s.pass_inverse
       << " PASS_INVERSE, " << s.fail_triple << " FAIL_TRIPLE, " << s.error << " ERROR\n";
}

} // namespace certmono
