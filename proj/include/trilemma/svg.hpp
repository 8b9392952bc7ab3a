#pragma once

#include <string>
#include <string_view>

namespace trilemma::svg {

/// Fixed two-decimal coordinate formatting keeps documents byte-stable
/// across platforms.
std::string num(double v);

std::string escape_text(std::string_view text);

/// Minimal deterministic SVG document builder: elements append in call
/// order, numbers format via num().
class Canvas {
public:
    Canvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, std::string_view cls);
    void polyline(std::string_view points, std::string_view cls);
    void circle(double cx, double cy, double r, std::string_view cls);
    void rect(double x, double y, double w, double h, std::string_view cls);
    void text(double x, double y, std::string_view content, std::string_view cls,
              std::string_view extra_attrs = {});
    void raw(std::string_view fragment);

    /// Closes the document and returns the full SVG text.
    std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

}  // namespace trilemma::svg
