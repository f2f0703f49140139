def _cell(value):
    if isinstance(value, float):
        return f'{value:.4f}'
    if isinstance(value, (list, tuple)):
        return ','.join(str(item) for item in value)
    return str(value)


def aligned_table(columns, rows):
    """Plain text table, one row per mapping in ``rows``"""
    cells = [[_cell(row.get(column, '')) for column in columns] for row in rows]
    widths = [
        max([len(column)] + [len(line[index]) for line in cells])
        for index, column in enumerate(columns)
    ]

    def render(values):
        return '  '.join(
            value.rjust(width) for value, width in zip(values, widths)
        ).rstrip()

    lines = [render(columns), render(['-' * width for width in widths])]
    lines += [render(line) for line in cells]
    return '\n'.join(lines) + '\n'


def cv_table(result):
    rows = list(result.folds)
    rows.append({'fold': 'mean', 'accuracy': result.mean})
    rows.append({'fold': 'std', 'accuracy': result.std})
    return aligned_table(['fold', 'train_size', 'test_size', 'accuracy'], rows)


def sweep_table(parameter, rows):
    return aligned_table([parameter, 'variant', 'mean', 'std'], rows)
