#include "extman/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "extman/errors.hpp"

namespace extman {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct View {
  double x0, y0;          // pixel origin of the panel
  double wx0, wx1;        // world x range
  double wv0, wv1;        // world second-axis range
  bool flip;              // world axis grows upward on screen

  double px(double wx) const { return x0 + (wx - wx0) / (wx1 - wx0) * 400.0; }
  double py(double wv) const {
    const double t = (wv - wv0) / (wv1 - wv0);
    return flip ? y0 + 380.0 - t * 380.0 : y0 + t * 380.0;
  }
};

// Andrew monotone chain, enough for the 8 projected corners of a box.
std::vector<Eigen::Vector2d> hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> out(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(out[k - 2], out[k - 1], pts[i]) <= 0.0) --k;
    out[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(out[k - 2], out[k - 1], pts[i]) <= 0.0) --k;
    out[k++] = pts[i];
  }
  out.resize(k - 1);
  return out;
}

void polygon(std::ostringstream& svg, const View& v,
             const std::vector<Eigen::Vector2d>& pts, const std::string& style) {
  if (pts.empty()) return;
  svg << "<polygon points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) svg << ' ';
    svg << num(v.px(pts[i].x())) << ',' << num(v.py(pts[i].y()));
  }
  svg << "\" " << style << "/>\n";
}

std::vector<Eigen::Vector2d> footprint(const Cuboid& box, const Pose& pose,
                                       int axis_a, int axis_b) {
  std::vector<Eigen::Vector2d> pts;
  for (const auto& c : corners(box, pose))
    pts.emplace_back(c[axis_a], c[axis_b]);
  return hull(pts);
}

void draw_scene(std::ostringstream& svg, const Scene& scene, const View& top,
                const View& side) {
  for (const Obstacle& obs : scene.obstacles) {
    polygon(svg, top, footprint(obs.box, obs.pose(), 0, 1),
            "fill=\"#d8d8d8\" stroke=\"#777777\" stroke-width=\"1\"");
    polygon(svg, side, footprint(obs.box, obs.pose(), 0, 2),
            "fill=\"#d8d8d8\" stroke=\"#777777\" stroke-width=\"1\"");
  }
  if (scene.wall) {
    const Plane plane = wall_plane(scene);
    const Eigen::Vector3d lat = wall_lateral(scene);
    const Eigen::Vector3d a = plane.point - 0.5 * scene.wall->length * lat;
    const Eigen::Vector3d b = plane.point + 0.5 * scene.wall->length * lat;
    svg << "<line x1=\"" << num(top.px(a.x())) << "\" y1=\"" << num(top.py(a.y()))
        << "\" x2=\"" << num(top.px(b.x())) << "\" y2=\"" << num(top.py(b.y()))
        << "\" stroke=\"#8a5a2b\" stroke-width=\"4\"/>\n";
    const double wx = scene.wall->center_x;
    polygon(svg, side,
            {{wx, 0.0},
             {wx + 0.02, 0.0},
             {wx + 0.02, scene.wall->height},
             {wx, scene.wall->height}},
            "fill=\"#8a5a2b\" stroke=\"none\"");
  }
  // ground line in the side view
  svg << "<line x1=\"" << num(side.px(side.wx0)) << "\" y1=\"" << num(side.py(0.0))
      << "\" x2=\"" << num(side.px(side.wx1)) << "\" y2=\"" << num(side.py(0.0))
      << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
}

}  // namespace

std::string trajectory_svg(const LoadedTrajectory& loaded) {
  const View top{40.0, 20.0, 0.0, 1.1, -0.6, 0.6, true};
  const View side{520.0, 20.0, 0.0, 1.1, 0.0, 0.55, true};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"420\" "
         "viewBox=\"0 0 960 420\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"420\" fill=\"#ffffff\"/>\n";
  svg << "<rect x=\"40\" y=\"20\" width=\"400\" height=\"380\" fill=\"none\" "
         "stroke=\"#aaaaaa\"/>\n";
  svg << "<rect x=\"520\" y=\"20\" width=\"400\" height=\"380\" fill=\"none\" "
         "stroke=\"#aaaaaa\"/>\n";

  draw_scene(svg, loaded.scene, top, side);

  const auto& pts = loaded.traj.points;
  if (!pts.empty()) {
    // object outline at the start and at the last state of each segment
    std::vector<size_t> marks{0};
    for (size_t i = 0; i + 1 < pts.size(); ++i)
      if (pts[i + 1].segment != pts[i].segment) marks.push_back(i);
    marks.push_back(pts.size() - 1);
    for (size_t m : marks) {
      const Pose& x = pts[m].state.object;
      const std::string style = m == pts.size() - 1
                                    ? "fill=\"#7fbf7f\" fill-opacity=\"0.8\" "
                                      "stroke=\"#2d6a2d\" stroke-width=\"1.5\""
                                    : "fill=\"none\" stroke=\"#4a77bb\" "
                                      "stroke-width=\"1\"";
      polygon(svg, top, footprint(loaded.object.box, x, 0, 1), style);
      polygon(svg, side, footprint(loaded.object.box, x, 0, 2), style);
    }

    for (int pass = 0; pass < 2; ++pass) {
      const View& v = pass == 0 ? top : side;
      svg << "<polyline points=\"";
      for (size_t i = 0; i < pts.size(); ++i) {
        const Eigen::Vector3d& p = pts[i].state.object.p;
        if (i) svg << ' ';
        svg << num(v.px(p.x())) << ',' << num(v.py(pass == 0 ? p.y() : p.z()));
      }
      svg << "\" fill=\"none\" stroke=\"#cc4444\" stroke-width=\"1\"/>\n";
    }
  }

  for (size_t i = 0; i < loaded.goals.size(); ++i) {
    const Eigen::Vector3d& g = loaded.goals[i].region.center.p;
    svg << "<circle cx=\"" << num(top.px(g.x())) << "\" cy=\"" << num(top.py(g.y()))
        << "\" r=\"4\" fill=\"none\" stroke=\"#d4a017\" stroke-width=\"1.5\"/>\n";
    svg << "<circle cx=\"" << num(side.px(g.x())) << "\" cy=\"" << num(side.py(g.z()))
        << "\" r=\"4\" fill=\"none\" stroke=\"#d4a017\" stroke-width=\"1.5\"/>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

void save_svg(const LoadedTrajectory& loaded, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write svg file: " + path);
  out << trajectory_svg(loaded);
}

}  // namespace extman
