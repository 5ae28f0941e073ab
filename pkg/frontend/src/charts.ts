// Hand-rolled canvas sparklines; one dependency fewer than a chart library
// and all we need is "line going up is bad".

export class Sparkline {
  private ctx: CanvasRenderingContext2D;
  private color: string;

  constructor(canvas: HTMLCanvasElement, color: string) {
    this.ctx = canvas.getContext("2d")!;
    this.color = color;
  }

  render(values: (number | null)[], max?: number) {
    const { canvas } = this.ctx;
    const w = canvas.width;
    const h = canvas.height;
    this.ctx.clearRect(0, 0, w, h);
    const xs = values.filter((v): v is number => v !== null);
    if (!xs.length) return;
    const top = max ?? Math.max(...xs, 1e-12);
    this.ctx.strokeStyle = this.color;
    this.ctx.lineWidth = 1.5;
    this.ctx.beginPath();
    let started = false;
    values.forEach((v, i) => {
      if (v === null) {
        started = false;
        return;
      }
      const x = (i / Math.max(values.length - 1, 1)) * (w - 2) + 1;
      const y = h - 2 - Math.min(v / top, 1) * (h - 4);
      if (started) {
        this.ctx.lineTo(x, y);
      } else {
        this.ctx.moveTo(x, y);
        started = true;
      }
    });
    this.ctx.stroke();
  }
}
