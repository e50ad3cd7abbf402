# -*- coding: utf-8 -*-

"""
plots.py

Plain SVG charts (grouped bars with error bars, line plots) for evaluation and trace outputs.
Every plotted value is written to a CSV next to the SVG, and carried exactly in each mark's <title>.
"""

from . import attractrfunctions as fxn
import html
import os


width = 760
height = 400
margin = {'left': 70, 'right': 170, 'top': 50, 'bottom': 60}
palette = ['#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd', '#8c564b', '#e377c2', '#7f7f7f']
font = 'font-family="Helvetica, Arial, sans-serif"'


def exact(value):
    """
    :return: text form of a plotted value, identical to what csv_text writes for it
    """
    if value is None:
        return 'NA'
    return repr(float(value)) if isinstance(value, float) else str(value)


def text(x, y, label, size=12, anchor='start', extra=''):
    return '<text x="' + format(x, '.1f') + '" y="' + format(y, '.1f') + '" font-size="' + str(size) + \
           '" text-anchor="' + anchor + '" ' + font + extra + '>' + html.escape(str(label)) + '</text>'


def line(x1, y1, x2, y2, colour='#333333', stroke_width=1, extra=''):
    return '<line x1="' + format(x1, '.1f') + '" y1="' + format(y1, '.1f') + '" x2="' + format(x2, '.1f') + \
           '" y2="' + format(y2, '.1f') + '" stroke="' + colour + '" stroke-width="' + str(stroke_width) + '"' + \
           extra + '/>'


def svg_document(title, parts):
    return '\n'.join(['<svg xmlns="http://www.w3.org/2000/svg" width="' + str(width) + '" height="' +
                      str(height) + '" viewBox="0 0 ' + str(width) + ' ' + str(height) + '">',
                      '<rect width="100%" height="100%" fill="#ffffff"/>',
                      text(width / 2, 28, title, 16, 'middle')] + parts + ['</svg>']) + '\n'


def plot_area():
    left, top = margin['left'], margin['top']
    return left, top, width - margin['left'] - margin['right'], height - margin['top'] - margin['bottom']


def y_axis(y_min, y_max, y_label, n_ticks=5):
    """
    :return: SVG parts for a labelled y axis with gridlines, and a function mapping values to y coordinates
    """
    left, top, plot_w, plot_h = plot_area()
    span = (y_max - y_min) or 1.0

    def to_y(value):
        return top + plot_h - (value - y_min) / span * plot_h

    parts = [line(left, top, left, top + plot_h), line(left, top + plot_h, left + plot_w, top + plot_h)]
    for i in range(n_ticks + 1):
        value = y_min + span * i / n_ticks
        parts.append(line(left, to_y(value), left + plot_w, to_y(value), '#dddddd'))
        parts.append(text(left - 6, to_y(value) + 4, format(value, '.2f'), 11, 'end'))
    parts.append(text(16, top + plot_h / 2, y_label, 12, 'middle',
                      ' transform="rotate(-90 16 ' + format(top + plot_h / 2, '.1f') + ')"'))
    return parts, to_y


def legend(series):
    left, top, plot_w, plot_h = plot_area()
    parts = []
    for i, name in enumerate(series):
        y = top + 10 + i * 20
        parts.append('<rect x="' + format(left + plot_w + 16, '.1f') + '" y="' + format(y - 9, '.1f') +
                     '" width="12" height="12" fill="' + palette[i % len(palette)] + '"/>')
        parts.append(text(left + plot_w + 34, y + 1, name, 11))
    return parts


def grouped_bar_svg(title, groups, series, values, y_label='accuracy', y_range=(0.0, 1.0)):
    """
    :param groups: x axis categories (e.g. SS, SP, PS, PP)
    :param series: bar names within each group (e.g. training regimes)
    :param values: {series: {group: (mean, std)}}, std drawn as an error bar (None values are skipped)
    :return: SVG document
    """
    left, top, plot_w, plot_h = plot_area()
    parts, to_y = y_axis(y_range[0], y_range[1], y_label)
    slot = plot_w / max(len(groups), 1)
    bar_w = slot * 0.8 / max(len(series), 1)

    for g, group in enumerate(groups):
        parts.append(text(left + slot * (g + 0.5), top + plot_h + 18, group, 12, 'middle'))
        for s, name in enumerate(series):
            mean, std = values.get(name, {}).get(group, (None, None))
            if mean is None:
                continue
            x = left + slot * g + slot * 0.1 + bar_w * s
            parts.append('<rect x="' + format(x, '.1f') + '" y="' + format(to_y(mean), '.1f') + '" width="' +
                         format(bar_w, '.1f') + '" height="' + format(to_y(y_range[0]) - to_y(mean), '.1f') +
                         '" fill="' + palette[s % len(palette)] + '"><title>' + html.escape(name) + ' ' +
                         html.escape(group) + ': ' + exact(mean) + ' +/- ' + exact(std) + '</title></rect>')
            if std:
                centre = x + bar_w / 2
                parts.append(line(centre, to_y(mean - std), centre, to_y(mean + std)))
                parts.append(line(centre - 3, to_y(mean + std), centre + 3, to_y(mean + std)))
                parts.append(line(centre - 3, to_y(mean - std), centre + 3, to_y(mean - std)))

    return svg_document(title, parts + legend(series))


def line_svg(title, x_labels, series, y_label='accuracy', y_range=None, dashed=()):
    """
    :param x_labels: categories along the x axis
    :param series: {name: list of values aligned with x_labels (None for gaps)}
    :param y_range: (min, max); defaults to the data range
    :param dashed: names of series drawn dashed (e.g. a ground truth line)
    :return: SVG document
    """
    left, top, plot_w, plot_h = plot_area()
    if y_range is None:
        found = [v for values in series.values() for v in values if v is not None]
        y_range = (min(found + [0.0]), max(found + [1.0]))
    parts, to_y = y_axis(y_range[0], y_range[1], y_label)
    step = plot_w / max(len(x_labels), 1)

    def to_x(i):
        return left + step * (i + 0.5)

    for i, label in enumerate(x_labels):
        parts.append(text(to_x(i), top + plot_h + 18, label, 11, 'middle'))

    for s, name in enumerate(series):
        colour = palette[s % len(palette)]
        points = [(to_x(i), to_y(v)) for i, v in enumerate(series[name]) if v is not None]
        if len(points) > 1:
            parts.append('<polyline fill="none" stroke="' + colour + '" stroke-width="2"' +
                         (' stroke-dasharray="6 4"' if name in dashed else '') + ' points="' +
                         ' '.join(format(x, '.1f') + ',' + format(y, '.1f') for x, y in points) + '"/>')
        for i, v in enumerate(series[name]):
            if v is not None:
                parts.append('<circle cx="' + format(to_x(i), '.1f') + '" cy="' + format(to_y(v), '.1f') +
                             '" r="3" fill="' + colour + '"><title>' + html.escape(name) + ' ' +
                             html.escape(str(x_labels[i])) + ': ' + exact(v) + '</title></circle>')

    return svg_document(title, parts + legend(series))


def write_plot(svg_path, svg, header, rows):
    """
    Write an SVG and the CSV holding its numbers (same path, .csv extension)
    :return: (svg path, csv path)
    """
    fxn.make_parent(svg_path)
    with open(svg_path, 'w', encoding='utf-8', newline='\n') as out_file:
        out_file.write(svg)
    csv_path = os.path.splitext(svg_path)[0] + '.csv'
    fxn.write_csv(csv_path, header, rows)
    return svg_path, csv_path


def plot_conditions(suite, summaries, out_path):
    """
    :param suite: template suite name
    :param summaries: {label (model set): {condition: {'mean', 'std', ...}}}
    """
    conditions = ['SS', 'SP', 'PS', 'PP']
    labels = list(summaries)
    values = {x: {c: (summaries[x][c]['mean'], summaries[x][c]['std']) for c in conditions} for x in labels}
    rows = [[x, suite, c, summaries[x][c]['mean'], summaries[x][c]['std'], summaries[x][c]['n']]
            for x in labels for c in conditions]
    return write_plot(out_path, grouped_bar_svg(suite + ' templates', conditions, labels, values),
                      ['model', 'suite', 'condition', 'mean', 'std', 'runs'], rows)


def plot_attractors(by_bucket, out_path, buckets=('0', '1', '2', '3', '4+')):
    """
    :param by_bucket: {label: {bucket: {'mean': accuracy, ...}}}
    """
    series = {x: [by_bucket[x][b]['mean'] for b in buckets] for x in by_bucket}
    rows = [[x, b, by_bucket[x][b]['mean'], by_bucket[x][b]['std']] for x in by_bucket for b in buckets]
    svg = line_svg('Agreement accuracy by number of attractors', list(buckets), series, y_range=(0.0, 1.0))
    return write_plot(out_path, svg, ['model', 'attractors', 'mean', 'std'], rows)


def plot_probes(comparison, out_path):
    """
    :param comparison: {label: {'agreement'|'lexical'|'pos': (mean, std)}}
    """
    measures = ['agreement', 'lexical', 'pos']
    values = {x: {m: comparison[x].get(m, (None, None)) for m in measures} for x in comparison}
    rows = [[x, m, values[x][m][0], values[x][m][1]] for x in comparison for m in measures]
    return write_plot(out_path, grouped_bar_svg('Agreement head vs language model probes', measures,
                                                list(comparison), values),
                      ['model', 'measure', 'mean', 'std'], rows)


def plot_trace(frame_id, tokens_by_variant, p_by_variant, truth_by_variant, out_path):
    """
    Plural probability after each word, for each number configuration of a frame, with the
    grammatical number as a dashed 0/1 line
    """
    variants = list(p_by_variant)
    length = max(len(p_by_variant[x]) for x in variants)
    series = {}
    for x in variants:
        series[x] = list(p_by_variant[x]) + [None] * (length - len(p_by_variant[x]))
        if truth_by_variant[x] is None:
            continue
        series[x + ' truth'] = [truth_by_variant[x]] * len(p_by_variant[x]) + [None] * (length - len(p_by_variant[x]))
    x_labels = list(tokens_by_variant[variants[0]]) + [''] * (length - len(tokens_by_variant[variants[0]]))
    rows = [[frame_id, x, i, tokens_by_variant[x][i], p_by_variant[x][i],
             'NA' if truth_by_variant[x] is None else truth_by_variant[x]]
            for x in variants for i in range(len(p_by_variant[x]))]
    svg = line_svg('P(plural) after each word: ' + frame_id, x_labels, series, 'P(plural)', (0.0, 1.0),
                   dashed=[x for x in series if x.endswith(' truth')])
    return write_plot(out_path, svg, ['frame', 'condition', 'position', 'token', 'p_plural', 'truth'], rows)


def plot_units(frame_id, tokens_by_variant, h_by_variant, units, out_path):
    """
    Activation of selected hidden units after each word, one line per (unit, condition)
    """
    variants = list(h_by_variant)
    length = max(len(h_by_variant[x]) for x in variants)
    series = {}
    rows = []
    for unit in units:
        for x in variants:
            values = [float(v) for v in h_by_variant[x][:, unit]]
            series['unit ' + str(unit) + ' ' + x] = values + [None] * (length - len(values))
            rows += [[frame_id, x, unit, i, tokens_by_variant[x][i], values[i]] for i in range(len(values))]
    x_labels = list(tokens_by_variant[variants[0]]) + [''] * (length - len(tokens_by_variant[variants[0]]))
    svg = line_svg('Hidden unit activations: ' + frame_id, x_labels, series, 'activation', (-1.0, 1.0))
    return write_plot(out_path, svg, ['frame', 'condition', 'unit', 'position', 'token', 'activation'], rows)
