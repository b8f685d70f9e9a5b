"""Renders ten matplotlib bar charts and annotates them.

Annotations come from artist geometry (spines, tick labels, legend handles,
bar patches); text boxes are tightened to their ink. Output: real_NN.png,
real_NN.truth.json and a combined ocr_fixture.json in this directory.

    python3 make_real_charts.py
"""

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
TAB = {
    "blue": (31, 119, 180),
    "orange": (255, 127, 14),
    "green": (44, 160, 44),
    "red": (214, 39, 40),
    "purple": (148, 103, 189),
    "brown": (140, 86, 75),
    "pink": (227, 119, 194),
    "gray": (127, 127, 127),
    "olive": (188, 189, 34),
    "cyan": (23, 190, 207),
}


def hexcolor(name):
    r, g, b = TAB[name]
    return f"#{r:02x}{g:02x}{b:02x}"


CHARTS = [
    dict(kind="vertical", cats=["ResNet", "VGG", "ViT", "Mixer", "DeiT"],
         series=[("value", "blue", [71.2, 64.5, 80.1, 76.4, 79.8])],
         legend=None, xlabel="Model", ylabel="Accuracy", spines=True),
    dict(kind="vertical", cats=["CIFAR", "SVHN", "STL", "MNIST"],
         series=[("Baseline", "blue", [62, 81, 55, 90]), ("Ours", "orange", [70, 86, 61, 94])],
         legend="upper left", xlabel="Dataset", ylabel="Score", spines=False, ylim=120),
    dict(kind="vertical", cats=["Q1", "Q2", "Q3", "Q4"],
         series=[("North", "blue", [12, 15, 11, 17]), ("South", "orange", [9, 12, 14, 10]),
                 ("West", "green", [6, 8, 10, 13])],
         legend="outside", xlabel="Quarter", ylabel="Revenue", spines=True, grid=True),
    dict(kind="stacked-vertical", cats=["2017", "2018", "2019", "2020", "2021"],
         series=[("Journal papers", "blue", [20, 25, 31, 28, 35]),
                 ("Conference papers", "green", [15, 22, 26, 30, 41])],
         legend="upper left", xlabel="Year", ylabel="Papers", spines=False, ylim=100),
    dict(kind="stacked-vertical", cats=["Mon", "Tue", "Wed", "Thu", "Fri", "Sat"],
         series=[("Bus", "blue", [30, 28, 35, 32, 40, 22]), ("Rail", "orange", [25, 27, 24, 29, 31, 12]),
                 ("Bike", "green", [10, 12, 9, 14, 11, 18])],
         legend="outside", xlabel="Day", ylabel="Trips", spines=True),
    dict(kind="horizontal", cats=["Python", "Rust", "Go", "Java"],
         series=[("Survey 2022", "green", [48, 13, 14, 33])],
         legend="lower right", xlabel="Share of respondents", ylabel="Language", spines=False),
    dict(kind="horizontal", cats=["Lisbon", "Madrid", "Paris", "Berlin", "Vienna"],
         series=[("Summer", "purple", [28, 33, 25, 24, 26]), ("Winter", "olive", [15, 10, 7, 3, 2])],
         legend="lower right", xlabel="Mean temperature", ylabel="City", spines=True, xlim=45),
    dict(kind="stacked-horizontal", cats=["Alpha", "Beta", "Gamma"],
         series=[("Train", "blue", [3.5, 2.0, 4.5]), ("Infer", "pink", [1.5, 2.5, 1.0])],
         legend="upper right", xlabel="Seconds", ylabel="Pipeline", spines=False, xlim=8),
    dict(kind="vertical", cats=["Small", "Base", "Large"],
         series=[("Clean", "blue", [81.3, 85.7, 88.2]), ("Noisy", "red", [70.4, 76.9, 80.5])],
         legend="upper left", xlabel="Model size", ylabel="F1", spines=True, title="Robustness to label noise",
         annotate=True, ylim=110),
    dict(kind="vertical", cats=["Vision", "NLP", "Speech", "Robotics"],
         series=[("2020", "blue", [2100, 2600, 900, 700]), ("2021", "orange", [2900, 3300, 1100, 1000])],
         legend="upper right", xlabel="Field", ylabel="Papers published", spines=False, ylim=4000),
]


def lum(img):
    img = img.astype(int)
    return (299 * img[..., 0] + 587 * img[..., 1] + 114 * img[..., 2] + 500) // 1000


def ink_box(img, x0, y0, x1, y1, thresh=200):
    """Tight box of pixels darker than `thresh` inside [x0,x1) x [y0,y1)."""
    h, w = img.shape[:2]
    x0, y0 = max(0, int(np.floor(x0))), max(0, int(np.floor(y0)))
    x1, y1 = min(w, int(np.ceil(x1))), min(h, int(np.ceil(y1)))
    sub = lum(img[y0:y1, x0:x1]) < thresh
    ys, xs = np.nonzero(sub)
    if len(xs) == 0:
        return None
    return [int(x0 + xs.min()), int(y0 + ys.min()), int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1)]


def text_rows(text_artist, H):
    bb = text_artist.get_window_extent()
    return bb.x0, H - bb.y1, bb.x1, H - bb.y0


def word_boxes(img, text_artist, renderer, H):
    """Per-word ink boxes for horizontal text; rotated text is one box."""
    s = text_artist.get_text()
    x0, y0, x1, y1 = text_rows(text_artist, H)
    if text_artist.get_rotation() % 180 != 0 or " " not in s:
        b = ink_box(img, x0 - 1, y0 - 1, x1 + 1, y1 + 1)
        return [(s, b)] if b else []
    prop = text_artist.get_fontproperties()
    out = []
    start = 0
    for word in s.split(" "):
        a = s.index(word, start)
        e = a + len(word)
        start = e
        wa = renderer.get_text_width_height_descent(s[:a], prop, ismath=False)[0] if a else 0
        we = renderer.get_text_width_height_descent(s[:e], prop, ismath=False)[0]
        b = ink_box(img, x0 + wa - 0.5, y0 - 1, x0 + we + 1, y1 + 1)
        if b:
            out.append((word, b))
    return out


def rect_px(patch, H):
    bb = patch.get_window_extent()
    c0, c1 = int(round(bb.x0)), int(round(bb.x1))
    r0, r1 = int(round(H - bb.y1)), int(round(H - bb.y0))
    return [c0, r0, max(1, c1 - c0), max(1, r1 - r0)]


def darkest(img, coords, axis, lo, hi):
    best, best_v = None, 1e9
    for c in coords:
        line = img[lo:hi, c] if axis == "col" else img[c, lo:hi]
        v = lum(line).mean()
        if v < best_v:
            best, best_v = c, v
    return best


def render(i, spec):
    image_id = f"real_{i:02d}"
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=100)
    horizontal = "horizontal" in spec["kind"]
    stacked = spec["kind"].startswith("stacked")
    cats = spec["cats"]
    n = len(spec["series"])
    pos = np.arange(len(cats))
    width = 0.8 if stacked or n == 1 else 0.8 / n
    base = np.zeros(len(cats))
    containers = []
    for j, (name, color, vals) in enumerate(spec["series"]):
        vals = np.array(vals, dtype=float)
        offs = pos if stacked or n == 1 else pos - 0.4 + width * (j + 0.5)
        label = None if spec["legend"] is None else name
        if horizontal:
            c = ax.barh(offs, vals, height=width, left=base if stacked else None, color=hexcolor(color), label=label)
        else:
            c = ax.bar(offs, vals, width=width, bottom=base if stacked else None, color=hexcolor(color), label=label)
        containers.append((name, color, vals, c))
        if stacked:
            base = base + vals
    if horizontal:
        ax.set_yticks(pos, cats)
        ax.invert_yaxis()
        if "xlim" in spec:
            ax.set_xlim(0, spec["xlim"])
    else:
        ax.set_xticks(pos, cats)
        if "ylim" in spec:
            ax.set_ylim(0, spec["ylim"])
    ax.set_xlabel(spec["xlabel"])
    ax.set_ylabel(spec["ylabel"])
    if not spec["spines"]:
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    if spec.get("grid"):
        ax.set_axisbelow(True)
        ax.yaxis.grid(True, color="#dddddd")
    if spec.get("title"):
        ax.set_title(spec["title"])
    if spec.get("annotate"):
        for _, _, _, c in containers:
            ax.bar_label(c, fmt="%.1f", padding=2)
    legend = None
    if spec["legend"] == "outside":
        legend = ax.legend(loc="upper left", bbox_to_anchor=(1.02, 1.0))
        fig.subplots_adjust(right=0.75)
    elif spec["legend"]:
        legend = ax.legend(loc=spec["legend"])

    fig.canvas.draw()
    renderer = fig.canvas.get_renderer()
    img = np.asarray(fig.canvas.buffer_rgba())[..., :3].copy()
    H, W = img.shape[:2]

    # axes from the axes-corner transform, refined to the darkest pixel line
    x0, y0 = ax.transAxes.transform((0, 0))
    x1, y1 = ax.transAxes.transform((1, 1))
    xc, yc = x0, H - y0
    top, bottom = int(round(H - y1)), int(round(H - y0))
    left, right = int(round(x0)), int(round(x1))
    near = range(-3, 4)
    col = darkest(img, [int(round(xc)) + d for d in near], "col", top + 5, bottom - 5)
    row = darkest(img, [int(round(yc)) + d for d in near], "row", left + 5, right - 5)
    axes = dict(y_axis_col=col, x_axis_row=row, y_axis_extent=[top, bottom], x_axis_extent=[left, right])

    text_boxes = []

    def add(artist):
        words = word_boxes(img, artist, renderer, H)
        for w, b in words:
            text_boxes.append(dict(text=w, bbox=b, confidence=1.0))
        return words

    def parse_number(text):
        try:
            return float(text.replace("−", "-").replace(",", ""))
        except ValueError:
            return None

    def ticks(axis_obj, lim):
        out = []
        locs = axis_obj.get_majorticklocs()
        for loc, lab in zip(locs, axis_obj.get_ticklabels()):
            if not lab.get_visible() or not lab.get_text() or not (min(lim) - 1e-9 <= loc <= max(lim) + 1e-9):
                continue
            words = add(lab)
            if not words:
                continue
            text = lab.get_text()
            value = parse_number(text)
            x0 = min(b[0] for _, b in words)
            y0 = min(b[1] for _, b in words)
            x1 = max(b[0] + b[2] for _, b in words)
            y1 = max(b[1] + b[3] for _, b in words)
            out.append(dict(text=text, bbox=[x0, y0, x1 - x0, y1 - y0], value=value))
        return out

    x_ticks = ticks(ax.xaxis, ax.get_xlim())
    y_ticks = ticks(ax.yaxis, ax.get_ylim())

    def label(artist):
        words = add(artist)
        return dict(text=artist.get_text(), boxes=[b for _, b in words])

    x_label = label(ax.xaxis.label)
    y_label = label(ax.yaxis.label)
    if spec.get("title"):
        add(ax.title)
    for child in ax.texts:
        add(child)

    legend_entries = []
    if legend is not None:
        for t, patch, (name, color, _, _) in zip(legend.get_texts(), legend.get_patches(), containers):
            words = add(t)
            boxes = [b for _, b in words]
            x0 = min(b[0] for b in boxes)
            y0 = min(b[1] for b in boxes)
            x1 = max(b[0] + b[2] for b in boxes)
            y1 = max(b[1] + b[3] for b in boxes)
            legend_entries.append(dict(name=name, name_box=[x0, y0, x1 - x0, y1 - y0],
                                       swatch_box=rect_px(patch, H), color=list(TAB[color])))

    # value axis scale
    if horizontal:
        p0 = ax.transData.transform((0, 0))[0]
        p1 = ax.transData.transform((1, 0))[0]
    else:
        p0 = ax.transData.transform((0, 0))[1]
        p1 = ax.transData.transform((0, 1))[1]
    alpha = 1.0 / abs(p1 - p0)

    bars = []
    for name, _, vals, c in containers:
        for cat, v, patch in zip(cats, vals, c.patches):
            bars.append(dict(series=name, category=cat, value=float(v), rect=rect_px(patch, H)))

    table = dict(
        x_label=spec["xlabel"],
        y_label=spec["ylabel"],
        categories=cats,
        series=[dict(name=name, color=list(TAB[color]), values=[float(v) for v in vals])
                for name, color, vals, _ in containers],
    )
    truth = dict(
        image_id=image_id, variant=spec["kind"], width=W, height=H, axes=axes, alpha=alpha,
        x_ticks=x_ticks, y_ticks=y_ticks, x_label=x_label, y_label=y_label, legend=legend_entries,
        bars=bars, text_boxes=text_boxes, table=table,
    )
    from PIL import Image

    Image.fromarray(img).save(os.path.join(HERE, f"{image_id}.png"))
    with open(os.path.join(HERE, f"{image_id}.truth.json"), "w") as f:
        json.dump(truth, f, indent=1)
        f.write("\n")
    plt.close(fig)
    return image_id, text_boxes


def main():
    plt.rcParams["font.family"] = "DejaVu Sans"
    fixture = {"images": {}}
    for i, spec in enumerate(CHARTS, start=1):
        image_id, boxes = render(i, spec)
        fixture["images"][image_id] = boxes
    with open(os.path.join(HERE, "ocr_fixture.json"), "w") as f:
        json.dump(fixture, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
