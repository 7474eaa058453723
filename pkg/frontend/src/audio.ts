// Short beep cues via WebAudio; silently inert outside a browser.

let ctx: AudioContext | null = null;

export function beep(frequencyHz = 880, durationMs = 120): void {
  if (typeof AudioContext === "undefined") return;
  ctx = ctx ?? new AudioContext();
  const osc = ctx.createOscillator();
  const gain = ctx.createGain();
  osc.frequency.value = frequencyHz;
  osc.type = "sine";
  gain.gain.setValueAtTime(0.12, ctx.currentTime);
  gain.gain.exponentialRampToValueAtTime(0.0001, ctx.currentTime + durationMs / 1000);
  osc.connect(gain).connect(ctx.destination);
  osc.start();
  osc.stop(ctx.currentTime + durationMs / 1000);
}

export function probeCue(): void {
  beep(660, 80);
}
