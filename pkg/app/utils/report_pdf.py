# app/utils/report_pdf.py
"""One-file PDF summary of a suite run: verdict, calibrated constants, the table and a chart of one column."""
import math

from PIL import Image, ImageDraw
from reportlab.lib.pagesizes import A4
from reportlab.lib.utils import ImageReader
from reportlab.pdfgen import canvas

from app.utils.export import format_number
from app.utils.logger import logger

CHART_SIZE = (480, 240)


def _chart(values):
    """Line chart of log10|value| drawn with PIL, so the PDF carries no font-dependent plotting."""
    image = Image.new("RGB", CHART_SIZE, "white")
    draw = ImageDraw.Draw(image)
    width, height = CHART_SIZE
    draw.rectangle([0, 0, width - 1, height - 1], outline="black")
    logs = [math.log10(abs(v)) for v in values if isinstance(v, (int, float)) and v and math.isfinite(v)]
    if len(logs) < 2:
        return image
    lo, hi = min(logs), max(logs)
    span = (hi - lo) or 1.0
    step = (width - 20) / (len(logs) - 1)
    points = [(10 + i * step, height - 10 - (value - lo) / span * (height - 20)) for i, value in enumerate(logs)]
    draw.line(points, fill="navy", width=2)
    for x, y in points:
        draw.ellipse([x - 3, y - 3, x + 3, y + 3], outline="navy")
    return image


def write_suite_pdf(path, title, summary, header, rows, chart_column=None):
    p = canvas.Canvas(path, pagesize=A4, invariant=1)
    width, height = A4
    p.setTitle(title)
    p.setFont("Helvetica-Bold", 14)
    p.drawString(50, height - 40, title)

    p.setFont("Helvetica", 10)
    y = height - 70
    for key in sorted(summary):
        value = summary[key]
        if isinstance(value, (dict, list)):
            continue
        p.drawString(50, y, f"{key}: {format_number(value)}")
        y -= 14

    if chart_column is not None and chart_column in header:
        index = header.index(chart_column)
        image = _chart([row[index] for row in rows])
        y -= CHART_SIZE[1] * 0.75 + 10
        p.drawString(50, y + CHART_SIZE[1] * 0.75 + 2, f"log10 |{chart_column}| by row")
        p.drawImage(ImageReader(image), 50, y, width=CHART_SIZE[0] * 0.75, height=CHART_SIZE[1] * 0.75)
        y -= 20

    columns = header[:7]
    x_positions = [50 + i * 75 for i in range(len(columns))]
    p.setFont("Helvetica-Bold", 8)
    for i, name in enumerate(columns):
        p.drawString(x_positions[i], y, str(name)[:14])
    y -= 14
    p.setFont("Helvetica", 8)
    for row in rows:
        if y < 50:
            p.showPage()
            y = height - 50
            p.setFont("Helvetica", 8)
        for i, value in enumerate(row[:len(columns)]):
            text = format_number(value)
            if isinstance(value, float):
                text = "{:.6g}".format(value)
            p.drawString(x_positions[i], y, text[:14])
        y -= 12

    p.save()
    logger.info(f"Suite summary written to {path}")
    return path
