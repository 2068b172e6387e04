"""Keyword-cascade baseline classifier derived from the annotation rubric."""

from __future__ import annotations

from ..errors import BackendUnavailable
from ..labels import Label
from ..window import ContextWindow
from .base import Backend

_LIBRARY = ("library(", "require(", "requirenamespace(", "p_load(",
            "install.packages(", "setwd(")
_READ = ("read.", "read_", "readrds(", "load(", "fread(", "scan(",
         "import(", "fromjson(", "readlines(", "read(")
_WRITE = ("write.", "write_", "saverds(", "save(", "save.image(", "ggsave(",
          "export(", "sink(", "tojson(",
          # graphics devices open a file for output
          "png(", "pdf(", "jpeg(", "tiff(", "svg(", "bmp(", "postscript(",
          "cairo_pdf(", "dev.off")
_PLOT = ("plot(", "ggplot", "geom_", "aes(", "hist(", "barplot(", "boxplot(",
         "lines(", "points(", "legend(", "axis(", "abline(", "theme", "facet_",
         "scale_", "coord_", "xlab", "ylab", "ggtitle", "image(", "heatmap(",
         "palette", "col =", "color", "colour", "density(")
_STATS = ("lm(", "glm(", "gam(", "lmer(", "glmer(", "aov(", "aov_ez(",
          "anova(", "t.test(", "wilcox.test(", "chisq.test(", "cor(",
          "cor.test(", "mean(", "sd(", "var(", "median(", "quantile(",
          "summary(", "predict(", "fitted(", "coef(", "residuals(", "glm.nb(",
          "prcomp(", "kmeans(", "model", "fit", "regression", "simulate(",
          "replicate(", "set.seed(", "p.value", "power")


def heuristic_classify(window: ContextWindow) -> Label:
    """First matching rule wins; everything unmatched is Data Wrangling."""
    code = window.target.code
    if code.lstrip().startswith("#"):
        return Label.COMMENT
    lowered = code.lower()
    for needles, label in (
        (_LIBRARY, Label.LOADING_LIBRARY),
        (_READ, Label.LOADING_DATA),
        (_WRITE, Label.SAVING_TO_OUTPUT),
        (_PLOT, Label.VISUALIZATION),
        (_STATS, Label.ANALYSIS),
    ):
        if any(needle in lowered for needle in needles):
            return label
    return Label.DATA_WRANGLING


class HeuristicBackend(Backend):
    """Backend wrapper over the keyword cascade."""

    token_limit = None
    concurrency_safe = True

    @property
    def backend_id(self) -> str:
        return "heuristic"

    def respond(self, prompt: str, window: ContextWindow | None = None) -> str:
        if window is None:
            raise BackendUnavailable(
                "heuristic backend classifies single lines, not whole files"
            )
        return heuristic_classify(window).display
