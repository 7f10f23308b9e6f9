const client = new Client({ token: token });
client.connect();