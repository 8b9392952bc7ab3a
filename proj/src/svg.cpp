#include "trilemma/svg.hpp"

#include <cmath>
#include <cstdio>

namespace trilemma::svg {

std::string num(double v) {
    if (!std::isfinite(v)) v = 0.0;
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::line(double x1, double y1, double x2, double y2, std::string_view cls) {
    body_ += "<line class=\"" + std::string(cls) + "\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) +
             "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\"/>\n";
}

void Canvas::polyline(std::string_view points, std::string_view cls) {
    body_ += "<polyline class=\"" + std::string(cls) + "\" points=\"" + std::string(points) +
             "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, std::string_view cls) {
    body_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) +
             "\" r=\"" + num(r) + "\"/>\n";
}

void Canvas::rect(double x, double y, double w, double h, std::string_view cls) {
    body_ += "<rect class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) +
             "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\"/>\n";
}

void Canvas::text(double x, double y, std::string_view content, std::string_view cls,
                  std::string_view extra_attrs) {
    body_ += "<text class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\"";
    if (!extra_attrs.empty()) {
        body_.push_back(' ');
        body_ += extra_attrs;
    }
    body_ += ">" + escape_text(content) + "</text>\n";
}

void Canvas::raw(std::string_view fragment) {
    body_ += fragment;
}

std::string Canvas::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
                      "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
                      num(height_) + "\">\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

}  // namespace trilemma::svg
