"""Talk to a live session service over its line protocol.

Start a service in another terminal first, e.g.:

    electrotactile serve --port 7340 --mode calibration

then run this script to complete the calibration as a scripted operator.
For a human-answered run use ``--human`` on the serve side and the browser
console instead.
"""

import asyncio
import json
import sys


async def scripted_operator(host="127.0.0.1", port=7340):
    reader, writer = await asyncio.open_connection(host, port)

    async def send(msg):
        writer.write((json.dumps(msg) + "\n").encode())
        await writer.drain()

    hello = json.loads(await reader.readline())
    print(f"server: protocol {hello['version']}, mode {hello['mode']}")
    await send({"type": "hello", "version": hello["version"], "seq": 0})
    await send({"type": "control", "action": "start", "seq": 1})

    seq = 1
    while True:
        msg = json.loads(await reader.readline())
        kind = msg["type"]
        if kind == "calibration_probe":
            intensity = msg["intensity_ma"]
            # pretend to be a subject with thresholds at 1.2 / 3.0 mA
            if intensity >= 3.0 - 1e-9:
                response = "discomfort"
            elif intensity >= 1.2 - 1e-9:
                response = "felt"
            else:
                response = "not_felt"
            print(f"probe {msg['probe_id']:3d}: {intensity:4.1f} mA -> {response}")
            seq += 1
            await send(
                {
                    "type": "calibration_response",
                    "probe_id": msg["probe_id"],
                    "response": response,
                    "seq": seq,
                }
            )
        elif kind == "event" and msg.get("name") == "calibration_done":
            print("\ncalibration result:")
            for key, value in msg["result"].items():
                print(f"  {key}: {value:.3f}")
        elif kind == "event" and msg.get("name") == "session_done":
            break
    writer.close()


if __name__ == "__main__":
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 7340
    asyncio.run(scripted_operator(port=port))
