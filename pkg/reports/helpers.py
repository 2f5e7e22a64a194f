import numpy as np


class PlotHelper:
    """
    Helper class for consistent matplotlib figures of the run outputs.
    """

    @staticmethod
    def style_axis(ax, title, xlabel=None, ylabel=None, grid=True,
                   xlim=None, ylim=None, legend=False, equal=False):
        """
        Apply consistent styling to an axis.

        Args:
            ax: Matplotlib axis object
            title (str): Plot title
            xlabel (str, optional): X-axis label
            ylabel (str, optional): Y-axis label
            grid (bool): Whether to show grid
            xlim (tuple, optional): X-axis limits (min, max)
            ylim (tuple, optional): Y-axis limits (min, max)
            legend (bool): Whether to show legend
            equal (bool): Equal aspect ratio, for planar paths
        """
        ax.set_title(title, fontsize=12, fontweight='bold')
        if xlabel:
            ax.set_xlabel(xlabel, fontsize=10)
        if ylabel:
            ax.set_ylabel(ylabel, fontsize=10)
        if grid:
            ax.grid(True, alpha=0.3)
        if xlim:
            ax.set_xlim(xlim)
        if ylim:
            ax.set_ylim(ylim)
        if equal:
            ax.set_aspect('equal', adjustable='datalim')
        if legend:
            ax.legend()

    @staticmethod
    def create_path(ax, values, title, label=None, color=None, marker=None):
        """
        Planar path of complex values, e.g. t -> R(t).

        Args:
            ax: Matplotlib axis object
            values: Complex samples along the path
            title (str): Plot title
            label (str, optional): Legend entry
        """
        values = np.asarray(values)
        ax.plot(values.real, values.imag, color=color, marker=marker, lw=1.0, label=label)
        PlotHelper.style_axis(ax, title, 'Re', 'Im', equal=True, legend=label is not None)

    @staticmethod
    def create_fit(ax, x, y, slope, intercept, title, xlabel, ylabel, loglog=False, color='steelblue'):
        """
        Scatter of measurements with the fitted line y = slope*x + intercept.

        With loglog=True, x and y are plotted on log axes and the fit is a
        power law with exponent `slope`.
        """
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        ax.scatter(x, y, c=color, alpha=0.8, label='measured')
        grid = np.linspace(x.min(), x.max(), 100) if not loglog else np.geomspace(x.min(), x.max(), 100)
        fitted = slope * grid + intercept if not loglog else np.exp(intercept) * grid**slope
        ax.plot(grid, fitted, 'r--', label=f'slope {slope:.3f}')
        if loglog:
            ax.set_xscale('log')
            ax.set_yscale('log')
        PlotHelper.style_axis(ax, title, xlabel, ylabel, legend=True)

    @staticmethod
    def create_lines(ax, x, series, title, xlabel, ylabel, logy=False):
        """
        Several curves over a shared x.

        Args:
            series (dict): Legend label -> y values
        """
        for label, y in series.items():
            ax.plot(x, y, lw=1.2, label=label)
        if logy:
            ax.set_yscale('log')
        PlotHelper.style_axis(ax, title, xlabel, ylabel, legend=True)

    @staticmethod
    def create_carpet(ax, x, row_labels, values, title, cmap='magma'):
        """
        Image of one row per label over the grid x, e.g. |u| at rational times.

        Args:
            row_labels: Labels of the rows, top to bottom
            values: Array of shape (len(row_labels), len(x))
        """
        extent = [float(x[0]), float(x[-1]), len(row_labels) - 0.5, -0.5]
        image = ax.imshow(values, aspect='auto', extent=extent, cmap=cmap, interpolation='nearest')
        ax.set_yticks(np.arange(len(row_labels)))
        ax.set_yticklabels([str(label) for label in row_labels], fontsize=8)
        ax.figure.colorbar(image, ax=ax)
        PlotHelper.style_axis(ax, title, 'x', None, grid=False)
