#include "ct/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ct/assignment.hpp"

namespace ct {

Timeline timeline_from_gt(const std::map<int, std::vector<GtEntry>>& gt) {
    Timeline out;
    for (const auto& [frame, entries] : gt) {
        for (const GtEntry& e : entries) out[frame].push_back({e.id, e.box});
    }
    return out;
}

Timeline timeline_from_results(const std::vector<ResultRow>& rows) {
    Timeline out;
    for (const ResultRow& r : rows) out[r.frame].push_back({r.id, r.box});
    return out;
}

ClearReport evaluate_clear(const Timeline& gt, const Timeline& hyp, double iou_gate) {
    ClearReport rep;
    for (const auto& [frame, boxes] : gt) rep.total_gt_boxes += static_cast<int>(boxes.size());
    if (rep.total_gt_boxes == 0) {
        throw std::invalid_argument("evaluate_clear: empty ground truth, MOTA undefined");
    }

    std::set<int> frames;
    int max_frame = 0;
    for (const auto& [frame, _] : gt) {
        frames.insert(frame);
        max_frame = std::max(max_frame, frame);
    }
    for (const auto& [frame, _] : hyp) {
        frames.insert(frame);
        max_frame = std::max(max_frame, frame);
    }

    std::map<int, int> last_match;  // gt id -> hyp id at its last matched frame
    struct GtStatus {
        int present = 0;
        int matched = 0;
        bool matched_before = false;
        bool in_gap = false;
    };
    std::map<int, GtStatus> status;
    double motp_sum = 0.0;

    static const std::vector<IdBox> kNone;
    for (int frame : frames) {
        auto git = gt.find(frame);
        auto hit = hyp.find(frame);
        const std::vector<IdBox>& g = git == gt.end() ? kNone : git->second;
        const std::vector<IdBox>& h = hit == hyp.end() ? kNone : hit->second;

        std::vector<char> g_used(g.size(), 0);
        std::vector<char> h_used(h.size(), 0);
        std::vector<std::pair<int, int>> pairs;  // indices into g, h

        // keep surviving correspondences from earlier frames
        for (size_t i = 0; i < g.size(); ++i) {
            auto prev = last_match.find(g[i].id);
            if (prev == last_match.end()) continue;
            for (size_t j = 0; j < h.size(); ++j) {
                if (h_used[j] || h[j].id != prev->second) continue;
                if (iou(g[i].box, h[j].box) >= iou_gate) {
                    pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
                    g_used[i] = 1;
                    h_used[j] = 1;
                }
                break;
            }
        }

        // assignment over the residual
        std::vector<int> g_rest, h_rest;
        for (size_t i = 0; i < g.size(); ++i) {
            if (!g_used[i]) g_rest.push_back(static_cast<int>(i));
        }
        for (size_t j = 0; j < h.size(); ++j) {
            if (!h_used[j]) h_rest.push_back(static_cast<int>(j));
        }
        CostMatrix cost(static_cast<int>(g_rest.size()), static_cast<int>(h_rest.size()));
        for (size_t a = 0; a < g_rest.size(); ++a) {
            for (size_t b = 0; b < h_rest.size(); ++b) {
                cost.at(static_cast<int>(a), static_cast<int>(b)) =
                    1.0 - iou(g[g_rest[a]].box, h[h_rest[b]].box);
            }
        }
        for (const auto& [a, b] : solve_assignment(cost, 1.0 - iou_gate).matches) {
            pairs.emplace_back(g_rest[a], h_rest[b]);
        }

        std::vector<char> g_matched(g.size(), 0);
        for (const auto& [i, j] : pairs) {
            const int gid = g[i].id;
            const int hid = h[j].id;
            auto prev = last_match.find(gid);
            if (prev != last_match.end() && prev->second != hid) rep.id_switches += 1;
            last_match[gid] = hid;
            motp_sum += iou(g[i].box, h[j].box);
            rep.total_matches += 1;
            g_matched[i] = 1;
        }
        rep.fn += static_cast<int>(g.size() - pairs.size());
        rep.fp += static_cast<int>(h.size() - pairs.size());

        for (size_t i = 0; i < g.size(); ++i) {
            GtStatus& st = status[g[i].id];
            st.present += 1;
            if (g_matched[i]) {
                st.matched += 1;
                if (st.matched_before && st.in_gap) rep.fragmentations += 1;
                st.matched_before = true;
                st.in_gap = false;
            } else if (st.matched_before) {
                st.in_gap = true;
            }
        }
    }

    rep.total_gt_tracks = static_cast<int>(status.size());
    for (const auto& [_, st] : status) {
        const double coverage = static_cast<double>(st.matched) / st.present;
        if (coverage >= 0.8) rep.mostly_tracked += 1;
        if (coverage <= 0.2) rep.mostly_lost += 1;
    }
    rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.id_switches) / rep.total_gt_boxes;
    rep.motp = rep.total_matches > 0 ? motp_sum / rep.total_matches : 0.0;
    rep.faf = max_frame > 0 ? static_cast<double>(rep.fp) / max_frame : 0.0;
    return rep;
}

IdReport evaluate_id(const Timeline& gt, const Timeline& hyp, double iou_gate) {
    int total_gt = 0;
    for (const auto& [_, boxes] : gt) total_gt += static_cast<int>(boxes.size());
    if (total_gt == 0) {
        throw std::invalid_argument("evaluate_id: empty ground truth, IDF1 undefined");
    }
    int total_hyp = 0;
    for (const auto& [_, boxes] : hyp) total_hyp += static_cast<int>(boxes.size());

    // overlap counts per (gt id, hyp id)
    std::map<int, int> gid_index, hid_index;
    for (const auto& [_, boxes] : gt) {
        for (const IdBox& b : boxes) gid_index.emplace(b.id, static_cast<int>(gid_index.size()));
    }
    for (const auto& [_, boxes] : hyp) {
        for (const IdBox& b : boxes) hid_index.emplace(b.id, static_cast<int>(hid_index.size()));
    }
    const int ng = static_cast<int>(gid_index.size());
    const int nh = static_cast<int>(hid_index.size());
    std::vector<int> overlap(static_cast<size_t>(ng) * std::max(nh, 1), 0);

    for (const auto& [frame, gboxes] : gt) {
        auto hit = hyp.find(frame);
        if (hit == hyp.end()) continue;
        for (const IdBox& gb : gboxes) {
            for (const IdBox& hb : hit->second) {
                if (iou(gb.box, hb.box) >= iou_gate) {
                    overlap[static_cast<size_t>(gid_index[gb.id]) * nh + hid_index[hb.id]] += 1;
                }
            }
        }
    }

    int idtp = 0;
    if (nh > 0) {
        int wmax = 0;
        for (int v : overlap) wmax = std::max(wmax, v);
        CostMatrix cost(ng, nh);
        for (int i = 0; i < ng; ++i) {
            for (int j = 0; j < nh; ++j) {
                cost.at(i, j) = static_cast<double>(wmax - overlap[static_cast<size_t>(i) * nh + j]);
            }
        }
        for (const auto& [i, j] : solve_assignment(cost, static_cast<double>(wmax) + 1.0).matches) {
            idtp += overlap[static_cast<size_t>(i) * nh + j];
        }
    }

    IdReport rep;
    rep.idtp = idtp;
    rep.idfn = total_gt - idtp;
    rep.idfp = total_hyp - idtp;
    rep.idf1 = 2.0 * idtp / (2.0 * idtp + rep.idfp + rep.idfn);
    return rep;
}

MetricsReport evaluate(const Timeline& gt, const Timeline& hyp, double iou_gate) {
    return {evaluate_clear(gt, hyp, iou_gate), evaluate_id(gt, hyp, iou_gate)};
}

std::string format_report_table(const MetricsReport& r) {
    char buf[512];
    std::ostringstream out;
    out << "MOTA    MOTP    IDF1    MT        ML        FP      FN      IDSW  Frag  FAF\n";
    const double mt_pct = r.clear.total_gt_tracks > 0
                              ? 100.0 * r.clear.mostly_tracked / r.clear.total_gt_tracks
                              : 0.0;
    const double ml_pct = r.clear.total_gt_tracks > 0
                              ? 100.0 * r.clear.mostly_lost / r.clear.total_gt_tracks
                              : 0.0;
    std::snprintf(buf, sizeof(buf),
                  "%-7.3f %-7.3f %-7.3f %3d/%4.0f%% %3d/%4.0f%% %-7d %-7d %-5d %-5d %-6.2f\n",
                  r.clear.mota, r.clear.motp, r.id.idf1, r.clear.mostly_tracked, mt_pct,
                  r.clear.mostly_lost, ml_pct, r.clear.fp, r.clear.fn, r.clear.id_switches,
                  r.clear.fragmentations, r.clear.faf);
    out << buf;
    return out.str();
}

std::string format_report_csv(const MetricsReport& r) {
    char buf[512];
    std::ostringstream out;
    out << "mota,motp,idf1,mt,ml,gt_tracks,fp,fn,idsw,frag,faf,idtp,idfp,idfn\n";
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%d,%d,%d,%d,%d,%d,%d,%.6f,%d,%d,%d\n",
                  r.clear.mota, r.clear.motp, r.id.idf1, r.clear.mostly_tracked,
                  r.clear.mostly_lost, r.clear.total_gt_tracks, r.clear.fp, r.clear.fn,
                  r.clear.id_switches, r.clear.fragmentations, r.clear.faf, r.id.idtp,
                  r.id.idfp, r.id.idfn);
    out << buf;
    return out.str();
}

}  // namespace ct
